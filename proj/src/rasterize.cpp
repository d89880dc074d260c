#include "fracperim/rasterize.hpp"

#include <cmath>

namespace fracperim {

int fine_factor(int dim) { return dim == 2 ? 4 : 2; }

Box snap_window(Box b, double h) {
  for (int i = 0; i < b.dim(); ++i) {
    double n = std::ceil(b.side(i) / h - 1e-9);
    b.hi[i] = b.lo[i] + n * h;
  }
  return b;
}

double RasterField::mass() const {
  double cell = std::pow(hf, dim);
  double s = 0.0;
  for (float v : occ) s += double(v);
  return s * cell;
}

RasterField rasterize(const std::function<bool(const Vec&)>& inside,
                      const Box& window, double h, int dim, int workers) {
  if (workers <= 0) workers = default_workers();
  RasterField f;
  f.dim = dim;
  f.fine = fine_factor(dim);
  f.hf = h / f.fine;
  f.window = window;
  int64_t total = 1;
  for (int i = 0; i < dim; ++i) {
    double n = window.side(i) / f.hf;
    f.nf[size_t(i)] = int(std::lround(n));
    if (std::abs(n - f.nf[size_t(i)]) > 1e-6)
      throw domain_error("rasterize: window sides must be multiples of h (use snap_window)");
    total *= f.nf[size_t(i)];
  }
  f.occ.assign(size_t(total), 0.0f);

  const int nz = dim == 3 ? f.nf[2] : 1;
  auto centre = [&](int i, int j, int k) {
    Vec p = Vec::zero(dim);
    p[0] = window.lo[0] + (i + 0.5) * f.hf;
    p[1] = window.lo[1] + (j + 0.5) * f.hf;
    if (dim == 3) p[2] = window.lo[2] + (k + 0.5) * f.hf;
    return p;
  };

  // pass 1: centre samples
  parallel_for(
      nz * int64_t(f.nf[1]),
      [&](int64_t lo, int64_t hi) {
        for (int64_t jk = lo; jk < hi; ++jk) {
          int j = int(jk % f.nf[1]), k = int(jk / f.nf[1]);
          for (int i = 0; i < f.nf[0]; ++i)
            f.occ[size_t(f.index(i, j, k))] = inside(centre(i, j, k)) ? 1.0f : 0.0f;
        }
      },
      workers);

  // pass 2: cells disagreeing with a face neighbour get 4^N subsamples
  std::vector<float> refined = f.occ;
  const int sub = 4;
  parallel_for(
      nz * int64_t(f.nf[1]),
      [&](int64_t lo, int64_t hi) {
        for (int64_t jk = lo; jk < hi; ++jk) {
          int j = int(jk % f.nf[1]), k = int(jk / f.nf[1]);
          for (int i = 0; i < f.nf[0]; ++i) {
            float v = f.occ[size_t(f.index(i, j, k))];
            bool boundary = false;
            const int di[6] = {1, -1, 0, 0, 0, 0};
            const int dj[6] = {0, 0, 1, -1, 0, 0};
            const int dk[6] = {0, 0, 0, 0, 1, -1};
            for (int q = 0; q < 2 * dim; ++q) {
              int ii = i + di[q], jj = j + dj[q], kk = k + dk[q];
              if (ii < 0 || jj < 0 || kk < 0 || ii >= f.nf[0] || jj >= f.nf[1] ||
                  (dim == 3 && kk >= f.nf[2]))
                continue;
              if (f.occ[size_t(f.index(ii, jj, kk))] != v) boundary = true;
            }
            if (!boundary) continue;
            int hits = 0, tot = 0;
            for (int a = 0; a < sub; ++a)
              for (int b = 0; b < sub; ++b) {
                if (dim == 2) {
                  Vec p = Vec::zero(2);
                  p[0] = window.lo[0] + (i + (a + 0.5) / sub) * f.hf;
                  p[1] = window.lo[1] + (j + (b + 0.5) / sub) * f.hf;
                  ++tot;
                  if (inside(p)) ++hits;
                } else {
                  for (int c = 0; c < sub; ++c) {
                    Vec p = Vec::zero(3);
                    p[0] = window.lo[0] + (i + (a + 0.5) / sub) * f.hf;
                    p[1] = window.lo[1] + (j + (b + 0.5) / sub) * f.hf;
                    p[2] = window.lo[2] + (k + (c + 0.5) / sub) * f.hf;
                    ++tot;
                    if (inside(p)) ++hits;
                  }
                }
              }
            refined[size_t(f.index(i, j, k))] = float(hits) / float(tot);
          }
        }
      },
      workers);
  f.occ.swap(refined);
  return f;
}

CoarseField coarsen(const RasterField& f) {
  CoarseField c;
  c.dim = f.dim;
  c.h = f.hf * f.fine;
  int64_t total = 1;
  for (int i = 0; i < f.dim; ++i) {
    c.nc[size_t(i)] = f.nf[size_t(i)] / f.fine;
    total *= c.nc[size_t(i)];
  }
  c.occ.assign(size_t(total), 0.0);
  c.mixed.assign(size_t(total), 0);
  const int F = f.fine;
  const int nz = c.dim == 3 ? c.nc[2] : 1;
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < c.nc[1]; ++j)
      for (int i = 0; i < c.nc[0]; ++i) {
        double acc = 0.0;
        bool any0 = false, any1 = false;
        for (int a = 0; a < F; ++a)
          for (int b = 0; b < F; ++b)
            for (int cc = 0; cc < (c.dim == 3 ? F : 1); ++cc) {
              float v = f.occ[size_t(
                  f.index(i * F + a, j * F + b, c.dim == 3 ? k * F + cc : 0))];
              acc += double(v);
              if (v < 1.0f) any0 = true;
              if (v > 0.0f) any1 = true;
            }
        int64_t idx = c.index(i, j, k);
        c.occ[size_t(idx)] = acc / std::pow(F, c.dim);
        c.mixed[size_t(idx)] = (any0 && any1) ? 1 : 0;
      }
  return c;
}

}  // namespace fracperim
