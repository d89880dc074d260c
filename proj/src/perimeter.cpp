#include "fracperim/perimeter.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <random>

#include "fracperim/cellpairs.hpp"
#include "fracperim/potential.hpp"
#include "fracperim/quadrature.hpp"
#include "fracperim/specfun.hpp"

namespace fracperim {

namespace {

std::mutex& fftw_mutex() {
  static std::mutex m;
  return m;
}

int fast_size(int n) {
  int m = n;
  while (true) {
    int r = m;
    for (int p : {2, 3, 5}) {
      while (r % p == 0) r /= p;
    }
    if (r == 1) return m;
    ++m;
  }
}

// C(delta) = sum_c a(c) b(c + delta), delta in [-(nc-1), nc-1]^N, via padded
// FFT correlation. Returned as the padded circular array plus its dims.
struct Correlation {
  std::array<int, 3> m{1, 1, 1};
  std::vector<double> c;
  int dim = 2;
  double at(int dx, int dy, int dz) const {
    int ix = dx >= 0 ? dx : m[0] + dx;
    int iy = dy >= 0 ? dy : m[1] + dy;
    int iz = dz >= 0 ? dz : m[2] + dz;
    return c[size_t(ix) + size_t(m[0]) * (size_t(iy) + size_t(m[1]) * size_t(iz))];
  }
};

Correlation correlate(const CoarseField& a, const CoarseField& b) {
  Correlation out;
  out.dim = a.dim;
  for (int i = 0; i < a.dim; ++i) out.m[size_t(i)] = fast_size(2 * a.nc[size_t(i)]);
  int64_t mt = int64_t(out.m[0]) * out.m[1] * out.m[2];
  // FFTW's row-major convention: dims ordered (n2, n1, n0) for our layout
  std::vector<double> ra(size_t(mt), 0.0), rb(size_t(mt), 0.0);
  auto fill = [&](std::vector<double>& dst, const std::vector<double>& occ) {
    for (int k = 0; k < (a.dim == 3 ? a.nc[2] : 1); ++k)
      for (int j = 0; j < a.nc[1]; ++j)
        for (int i = 0; i < a.nc[0]; ++i)
          dst[size_t(i) + size_t(out.m[0]) * (size_t(j) + size_t(out.m[1]) * size_t(k))] =
              occ[size_t(a.index(i, j, k))];
  };
  fill(ra, a.occ);
  fill(rb, b.occ);

  int64_t comp = int64_t(out.m[0] / 2 + 1) * out.m[1] * out.m[2];
  fftw_complex* ca = fftw_alloc_complex(size_t(comp));
  fftw_complex* cb = fftw_alloc_complex(size_t(comp));
  fftw_plan pa, pb, pc;
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    if (a.dim == 2) {
      pa = fftw_plan_dft_r2c_2d(out.m[1], out.m[0], ra.data(), ca, FFTW_ESTIMATE);
      pb = fftw_plan_dft_r2c_2d(out.m[1], out.m[0], rb.data(), cb, FFTW_ESTIMATE);
    } else {
      pa = fftw_plan_dft_r2c_3d(out.m[2], out.m[1], out.m[0], ra.data(), ca,
                                FFTW_ESTIMATE);
      pb = fftw_plan_dft_r2c_3d(out.m[2], out.m[1], out.m[0], rb.data(), cb,
                                FFTW_ESTIMATE);
    }
  }
  fftw_execute(pa);
  fftw_execute(pb);
  // conj(A) * B
  for (int64_t i = 0; i < comp; ++i) {
    double ar = ca[i][0], ai = ca[i][1];
    double br = cb[i][0], bi = cb[i][1];
    ca[i][0] = ar * br + ai * bi;
    ca[i][1] = ar * bi - ai * br;
  }
  out.c.assign(size_t(mt), 0.0);
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    if (a.dim == 2)
      pc = fftw_plan_dft_c2r_2d(out.m[1], out.m[0], ca, out.c.data(), FFTW_ESTIMATE);
    else
      pc = fftw_plan_dft_c2r_3d(out.m[2], out.m[1], out.m[0], ca, out.c.data(),
                                FFTW_ESTIMATE);
  }
  fftw_execute(pc);
  for (double& v : out.c) v /= double(mt);
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    fftw_destroy_plan(pa);
    fftw_destroy_plan(pb);
    fftw_destroy_plan(pc);
  }
  fftw_free(ca);
  fftw_free(cb);
  return out;
}

// closed-form exit parameter of the ray x + t d from an axis box
double ray_box_exit(const Vec& x, const Vec& d, const Box& box) {
  double t = 1e300;
  for (int i = 0; i < x.dim; ++i) {
    if (d[i] > 1e-300)
      t = std::min(t, (box.hi[i] - x[i]) / d[i]);
    else if (d[i] < -1e-300)
      t = std::min(t, (box.lo[i] - x[i]) / d[i]);
  }
  return t;
}

// kernel integral over (R^N \ window) or ((R^N_+) \ window) from x inside
double window_tail(const Vec& x, const Box& window, double two_s, TailRegion tail,
                   int dim) {
  if (tail == TailRegion::none) return 0.0;
  double acc = 0.0;
  if (dim == 2) {
    const int M = 256;
    for (int j = 0; j < M; ++j) {
      double t = 2.0 * M_PI * (j + 0.5) / M;
      Vec d(std::cos(t), std::sin(t));
      double tb = ray_box_exit(x, d, window);
      double seg = std::pow(tb, -two_s);
      if (tail == TailRegion::halfspace && d[1] < 0.0) {
        double tf = -x[1] / d[1];  // window floor at x2 = 0
        seg -= std::pow(tf, -two_s);
        if (seg < 0.0) seg = 0.0;
      }
      acc += (2.0 * M_PI / M) * seg / two_s;
    }
  } else {
    const int np = 16, na = 32;
    Quad1D gl = gauss_legendre(np, -1.0, 1.0);
    for (int ip = 0; ip < np; ++ip) {
      double ct = gl.x[size_t(ip)];
      double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
      for (int ia = 0; ia < na; ++ia) {
        double phi = 2.0 * M_PI * (ia + 0.5) / na;
        Vec d(st * std::cos(phi), st * std::sin(phi), ct);
        double tb = ray_box_exit(x, d, window);
        double seg = std::pow(tb, -two_s);
        if (tail == TailRegion::halfspace && d[2] < 0.0) {
          double tf = -x[2] / d[2];
          seg -= std::pow(tf, -two_s);
          if (seg < 0.0) seg = 0.0;
        }
        acc += gl.w[size_t(ip)] * (2.0 * M_PI / na) * seg / two_s;
      }
    }
  }
  return acc;
}

}  // namespace

namespace {

// dense offset-indexed view of the unit-cell pair integrals
struct PairTable {
  int R = 0;
  int side = 1;
  int dim = 2;
  std::vector<double> w;
  double at(int di, int dj, int dk) const {
    size_t idx = size_t(di + R) + size_t(side) * size_t(dj + R);
    if (dim == 3) idx += size_t(side) * size_t(side) * size_t(dk + R);
    return w[idx];
  }
};

PairTable build_pair_table(int dim, double s, int R) {
  PairTable t;
  t.R = R;
  t.side = 2 * R + 1;
  t.dim = dim;
  int64_t n = int64_t(t.side) * t.side * (dim == 3 ? t.side : 1);
  t.w.assign(size_t(n), 0.0);
  for (int dk = dim == 3 ? -R : 0; dk <= (dim == 3 ? R : 0); ++dk)
    for (int dj = -R; dj <= R; ++dj)
      for (int di = -R; di <= R; ++di) {
        if (di == 0 && dj == 0 && dk == 0) continue;
        double v = unit_cell_pair_integral(dim, s, {di, dj, dk});
        t.w[size_t(di + R) + size_t(t.side) * size_t(dj + R) +
            (dim == 3 ? size_t(t.side) * size_t(t.side) * size_t(dk + R) : 0)] = v;
      }
  return t;
}

}  // namespace

double field_pair_energy(const RasterField& inner, const RasterField& outer,
                         const FracParams& params, int near_rings, TailRegion tail,
                         int workers) {
  if (workers <= 0) workers = default_workers();
  const int dim = params.dim;
  const double two_s = 2.0 * params.s;
  const int F = inner.fine;
  CoarseField ci = coarsen(inner), co = coarsen(outer);
  const double h = ci.h, hf = inner.hf;
  const double scale_c = std::pow(h, dim - two_s);
  const double scale_f = std::pow(hf, dim - two_s);
  const int ring = near_rings;
  const PairTable wc = build_pair_table(dim, params.s, ring);
  const PairTable wf = build_pair_table(dim, params.s, ring * F + F - 1);

  // near field: exact cell-pair integrals, fine descent across the interface
  const int nz = dim == 3 ? ci.nc[2] : 1;
  double near = parallel_sum(
      int64_t(nz) * ci.nc[1],
      [&](int64_t jk) {
        int j = int(jk % ci.nc[1]), k = int(jk / ci.nc[1]);
        double acc = 0.0;
        for (int i = 0; i < ci.nc[0]; ++i) {
          double occ1 = ci.occ[size_t(ci.index(i, j, k))];
          if (occ1 <= 0.0) continue;
          bool m1 = ci.mixed[size_t(ci.index(i, j, k))] != 0;
          for (int dk = dim == 3 ? -ring : 0; dk <= (dim == 3 ? ring : 0); ++dk)
            for (int dj = -ring; dj <= ring; ++dj)
              for (int di = -ring; di <= ring; ++di) {
                int ii = i + di, jj = j + dj, kk = k + dk;
                if (ii < 0 || jj < 0 || kk < 0 || ii >= ci.nc[0] || jj >= ci.nc[1] ||
                    (dim == 3 && kk >= ci.nc[2]))
                  continue;
                double occ2 = co.occ[size_t(co.index(ii, jj, kk))];
                if (occ2 <= 0.0) continue;
                bool m2 = co.mixed[size_t(co.index(ii, jj, kk))] != 0;
                if (!m1 && !m2) {
                  if (di == 0 && dj == 0 && dk == 0) continue;  // disjoint fields
                  acc += occ1 * occ2 * scale_c * wc.at(di, dj, dk);
                } else {
                  // fine subcell pairs; the same-fine-cell term is dropped
                  for (int fk = 0; fk < (dim == 3 ? F : 1); ++fk)
                    for (int fj = 0; fj < F; ++fj)
                      for (int fi = 0; fi < F; ++fi) {
                        double o1 = inner.occ[size_t(inner.index(
                            i * F + fi, j * F + fj, dim == 3 ? k * F + fk : 0))];
                        if (o1 <= 0.0f) continue;
                        for (int gk = 0; gk < (dim == 3 ? F : 1); ++gk)
                          for (int gj = 0; gj < F; ++gj)
                            for (int gi = 0; gi < F; ++gi) {
                              int ddi = di * F + gi - fi;
                              int ddj = dj * F + gj - fj;
                              int ddk = dk * F + gk - fk;
                              if (ddi == 0 && ddj == 0 && ddk == 0) continue;
                              double o2 = outer.occ[size_t(outer.index(
                                  ii * F + gi, jj * F + gj, dim == 3 ? kk * F + gk : 0))];
                              if (o2 <= 0.0f) continue;
                              acc += double(o1) * double(o2) * scale_f *
                                     wf.at(ddi, ddj, ddk);
                            }
                      }
                }
              }
        }
        return acc;
      },
      workers);

  // far field: midpoint kernel times the occupancy correlation
  Correlation corr = correlate(ci, co);
  const double cellvol2 = std::pow(h, 2.0 * dim);
  const int mx = ci.nc[0] - 1, my = ci.nc[1] - 1, mz = dim == 3 ? ci.nc[2] - 1 : 0;
  double far = parallel_sum(
      int64_t(2 * my + 1) * (2 * mz + 1),
      [&](int64_t row) {
        int dy = int(row % (2 * my + 1)) - my;
        int dz = int(row / (2 * my + 1)) - mz;
        double acc = 0.0;
        for (int dx = -mx; dx <= mx; ++dx) {
          if (std::max({std::abs(dx), std::abs(dy), std::abs(dz)}) <= ring) continue;
          double c = corr.at(dx, dy, dz);
          if (c == 0.0) continue;
          double r2 = double(dx) * dx + double(dy) * dy + double(dz) * dz;
          acc += c * cellvol2 * std::pow(r2 * h * h, -0.5 * (dim + two_s));
        }
        return acc;
      },
      workers);

  // tail beyond the window
  double tail_sum = 0.0;
  if (tail != TailRegion::none) {
    tail_sum = parallel_sum(
        int64_t(nz) * ci.nc[1],
        [&](int64_t jk) {
          int j = int(jk % ci.nc[1]), k = int(jk / ci.nc[1]);
          double acc = 0.0;
          for (int i = 0; i < ci.nc[0]; ++i) {
            double occ1 = ci.occ[size_t(ci.index(i, j, k))];
            if (occ1 <= 0.0) continue;
            Vec x = Vec::zero(dim);
            x[0] = inner.window.lo[0] + (i + 0.5) * h;
            x[1] = inner.window.lo[1] + (j + 0.5) * h;
            if (dim == 3) x[2] = inner.window.lo[2] + (k + 0.5) * h;
            acc += occ1 * std::pow(h, dim) * window_tail(x, inner.window, two_s, tail, dim);
          }
          return acc;
        },
        workers);
  }
  return near + far + tail_sum;
}

namespace {

RasterField complement_field(const RasterField& f) {
  RasterField g = f;
  for (float& v : g.occ) v = 1.0f - v;
  return g;
}

void check_inside_window(const RasterField& f, int margin_coarse) {
  const int F = f.fine;
  int m = margin_coarse * F;
  const int nz = f.dim == 3 ? f.nf[2] : 1;
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < f.nf[1]; ++j)
      for (int i = 0; i < f.nf[0]; ++i) {
        if (f.occ[size_t(f.index(i, j, k))] <= 0.0f) continue;
        if (i < m || j < m || i >= f.nf[0] - m || j >= f.nf[1] - m ||
            (f.dim == 3 && (k < m || k >= f.nf[2] - m)))
          throw domain_error(
              "perimeter: set touches the window margin (window too small or set unbounded)");
      }
}

double grid_energy_once(const Domain& E, const FracParams& params, const Box& window,
                        double h, int rings, TailRegion tail, int workers,
                        const Domain* omega) {
  auto inside = [&](const Vec& p) { return E.contains(p); };
  RasterField fe = rasterize(inside, window, h, params.dim, workers);
  check_inside_window(fe, rings + 1);
  RasterField fo;
  if (omega) {
    auto in_omega = [&](const Vec& p) { return omega->contains(p) && !E.contains(p); };
    fo = rasterize(in_omega, window, h, params.dim, workers);
  } else {
    fo = complement_field(fe);
  }
  return field_pair_energy(fe, fo, params, rings, tail, workers);
}

double richardson_p(const FracParams& params) { return 1.0 - 2.0 * params.s; }

}  // namespace

PerimeterEstimate perimeter_grid(const Domain& E, const FracParams& params,
                                 const GridSpec& grid, int workers) {
  if (!E.bounded()) throw domain_error("perimeter_grid: E must be bounded");
  Box window = snap_window(grid.window, 2.0 * grid.h);
  load_cellpair_cache(params.dim, params.s);
  double ph = grid_energy_once(E, params, window, grid.h, grid.near_field_rings,
                               TailRegion::all_space, workers, nullptr);
  double p2h = grid_energy_once(E, params, window, 2.0 * grid.h, grid.near_field_rings,
                                TailRegion::all_space, workers, nullptr);
  save_cellpair_cache(params.dim, params.s);
  double p = richardson_p(params);
  double f = std::pow(2.0, p);
  PerimeterEstimate est;
  est.value = (f * ph - p2h) / (f - 1.0);
  est.error_bound = std::abs(est.value - ph) + 1e-3 * std::abs(est.value - ph);
  est.method = "grid";
  return est;
}

PerimeterEstimate perimeter_rel(const Domain& E, const Domain& omega,
                                const FracParams& params, const GridSpec& grid,
                                int workers) {
  if (!E.bounded()) throw domain_error("perimeter_rel: E must be bounded");
  load_cellpair_cache(params.dim, params.s);
  PerimeterEstimate est;
  est.method = "grid-rel";

  // sampled containment check E subset Omega
  {
    Box eb = E.bounding_box();
    int miss = 0, tot = 0;
    for (int i = 0; i < 9; ++i)
      for (int j = 0; j < 9; ++j) {
        Vec p = Vec::zero(params.dim);
        p[0] = eb.lo[0] + (i + 0.5) / 9.0 * eb.side(0);
        p[1] = eb.lo[1] + (j + 0.5) / 9.0 * eb.side(1);
        if (params.dim == 3) p[2] = 0.5 * (eb.lo[2] + eb.hi[2]);
        if (!E.contains(p)) continue;
        ++tot;
        if (!omega.contains(p)) ++miss;
      }
    if (miss > 0) est.warning = "E not contained in Omega at sampled points";
  }

  if (omega.kind == DomainKind::halfspace) {
    Box window = snap_window(grid.window, 2.0 * grid.h);
    if (omega.normal_axis != params.dim - 1)
      throw domain_error("perimeter_rel: halfspace must be along the last axis");
    if (std::abs(window.lo[params.dim - 1]) > 1e-12)
      throw domain_error("perimeter_rel: halfspace window must start at the floor");
    double ph = grid_energy_once(E, params, window, grid.h, grid.near_field_rings,
                                 TailRegion::halfspace, workers, nullptr);
    double p2h = grid_energy_once(E, params, window, 2.0 * grid.h,
                                  grid.near_field_rings, TailRegion::halfspace,
                                  workers, nullptr);
    double p = richardson_p(params), f = std::pow(2.0, p);
    est.value = (f * ph - p2h) / (f - 1.0);
    est.error_bound = std::abs(est.value - ph) * 1.001;
    save_cellpair_cache(params.dim, params.s);
    return est;
  }

  Box ob = omega.bounding_box();
  Box eb = E.bounding_box();
  double omax = 0.0, emax = 0.0;
  for (int i = 0; i < params.dim; ++i) {
    omax = std::max(omax, ob.side(i));
    emax = std::max(emax, eb.side(i));
  }
  if (omax <= 4.0 * emax) {
    // direct two-field route on a window holding Omega and E
    Box hull = ob;
    for (int i = 0; i < params.dim; ++i) {
      hull.lo[i] = std::min(hull.lo[i], eb.lo[i]);
      hull.hi[i] = std::max(hull.hi[i], eb.hi[i]);
    }
    // margin must clear the window-edge check at the coarser 2h pass too
    Box window = snap_window(hull.padded((grid.near_field_rings + 3) * 2.0 * grid.h),
                             2.0 * grid.h);
    double ph = grid_energy_once(E, params, window, grid.h, grid.near_field_rings,
                                 TailRegion::none, workers, &omega);
    double p2h = grid_energy_once(E, params, window, 2.0 * grid.h,
                                  grid.near_field_rings, TailRegion::none, workers,
                                  &omega);
    double p = richardson_p(params), f = std::pow(2.0, p);
    est.value = (f * ph - p2h) / (f - 1.0);
    est.error_bound = std::abs(est.value - ph) * 1.001;
    save_cellpair_cache(params.dim, params.s);
    return est;
  }

  // Omega much larger than E: exact splitting P_s(E) - int_E V_Omega
  PerimeterEstimate base = perimeter_grid(E, params, grid, workers);
  auto inside = [&](const Vec& p) { return E.contains(p); };
  Box window = snap_window(grid.window, 2.0 * grid.h);
  RasterField fe = rasterize(inside, window, grid.h, params.dim, workers);
  CoarseField ce = coarsen(fe);
  double vol_term = 0.0;
  const int nz = params.dim == 3 ? ce.nc[2] : 1;
  std::vector<double> cellv(ce.occ.size(), 0.0);
  parallel_for(
      int64_t(nz) * ce.nc[1],
      [&](int64_t lo, int64_t hi) {
        for (int64_t jk = lo; jk < hi; ++jk) {
          int j = int(jk % ce.nc[1]), k = int(jk / ce.nc[1]);
          for (int i = 0; i < ce.nc[0]; ++i) {
            double occ = ce.occ[size_t(ce.index(i, j, k))];
            if (occ <= 0.0) continue;
            Vec x = Vec::zero(params.dim);
            x[0] = window.lo[0] + (i + 0.5) * ce.h;
            x[1] = window.lo[1] + (j + 0.5) * ce.h;
            if (params.dim == 3) x[2] = window.lo[2] + (k + 0.5) * ce.h;
            cellv[size_t(ce.index(i, j, k))] =
                occ * std::pow(ce.h, params.dim) * potential(omega, x, params);
          }
        }
      },
      workers <= 0 ? default_workers() : workers);
  for (double v : cellv) vol_term += v;
  est.value = base.value - vol_term;
  est.error_bound = base.error_bound + 1e-6 * std::abs(vol_term);
  save_cellpair_cache(params.dim, params.s);
  return est;
}

PerimeterEstimate perimeter_mc(const Domain& E, const FracParams& params,
                               const McSpec& mc, int workers) {
  if (!E.bounded()) throw domain_error("perimeter_mc: E must be bounded");
  if (mc.samples < 1) throw domain_error("perimeter_mc: need samples >= 1");
  const int dim = params.dim;
  const double two_s = 2.0 * params.s;
  Box bb = E.bounding_box().padded(1e-9);
  const double D = bb.diameter();

  std::vector<double> strata = mc.strata;
  if (strata.empty()) {
    for (double f : {1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0}) strata.push_back(f * D);
  }
  for (size_t i = 0; i + 1 < strata.size(); ++i)
    if (!(strata[i] < strata[i + 1]))
      throw domain_error("perimeter_mc: strata must be strictly increasing");

  // |E| estimate from a dedicated stream
  int64_t n_vol = std::min<int64_t>(mc.samples, 2000000);
  int64_t acc_vol = 0;
  {
    std::mt19937_64 rng(derive_seed(mc.seed, 0));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int64_t i = 0; i < n_vol; ++i) {
      Vec p = Vec::zero(dim);
      for (int d = 0; d < dim; ++d) p[d] = bb.lo[d] + u(rng) * bb.side(d);
      if (E.contains(p)) ++acc_vol;
    }
  }
  if (acc_vol == 0)
    return PerimeterEstimate{0.0, 0.0, "mc", "zero-acceptance: set may be empty"};
  double p_acc = double(acc_vol) / double(n_vol);
  double vol = bb.volume() * p_acc;
  double rel_se_vol = std::sqrt((1.0 - p_acc) / double(acc_vol));

  const double sphere = sphere_area(dim);
  const size_t ns = strata.size() - 1;
  int64_t per_stratum = std::max<int64_t>(1, mc.samples / int64_t(ns));

  std::vector<double> contrib(ns, 0.0), var_term(ns, 0.0);
  parallel_for(
      int64_t(ns),
      [&](int64_t lo_s, int64_t hi_s) {
        for (int64_t is = lo_s; is < hi_s; ++is) {
          double a = strata[size_t(is)], b = strata[size_t(is) + 1];
          double Z = (std::pow(a, -two_s) - std::pow(b, -two_s)) / two_s;
          std::mt19937_64 rng(derive_seed(mc.seed, uint64_t(is) + 1));
          std::uniform_real_distribution<double> u(0.0, 1.0);
          std::normal_distribution<double> gauss(0.0, 1.0);
          int64_t hits = 0, n = per_stratum;
          for (int64_t i = 0; i < n; ++i) {
            // x uniform in E by rejection
            Vec x = Vec::zero(dim);
            int guard = 0;
            do {
              for (int d = 0; d < dim; ++d) x[d] = bb.lo[d] + u(rng) * bb.side(d);
              if (++guard > 100000)
                throw numeric_error("perimeter_mc: rejection sampling starved");
            } while (!E.contains(x));
            // direction uniform on the sphere
            Vec w = Vec::zero(dim);
            if (dim == 2) {
              double t = 2.0 * M_PI * u(rng);
              w[0] = std::cos(t);
              w[1] = std::sin(t);
            } else {
              double nrm = 0.0;
              do {
                for (int d = 0; d < 3; ++d) w[d] = gauss(rng);
                nrm = w.norm();
              } while (nrm < 1e-12);
              w = w / nrm;
            }
            // radius from the exact restricted density ~ r^{-1-2s}
            double ua = std::pow(a, -two_s), ub = std::pow(b, -two_s);
            double r = std::pow(ua - u(rng) * (ua - ub), -1.0 / two_s);
            if (!E.contains(x + w * r)) ++hits;
          }
          double ph = double(hits) / double(n);
          contrib[size_t(is)] = vol * sphere * Z * ph;
          double se_p = std::sqrt(std::max(ph * (1.0 - ph), 1.0 / double(n)) / double(n));
          var_term[size_t(is)] = vol * sphere * Z * se_p;
        }
      },
      workers <= 0 ? default_workers() : workers);

  // certain tail r >= D: chi_{E^c} = 1
  double certain = vol * sphere * std::pow(D, -two_s) / two_s;
  // geometric continuation below the smallest stratum
  double q = std::pow(strata[1] / strata[0], -(1.0 - two_s));
  double subtail = contrib[0] * q / (1.0 - q);

  double total = certain + subtail;
  double var = 0.0;
  for (size_t i = 0; i < ns; ++i) {
    total += contrib[i];
    var += var_term[i] * var_term[i];
  }
  double se = std::sqrt(var + (rel_se_vol * total) * (rel_se_vol * total)) + subtail;

  PerimeterEstimate est;
  est.value = total;
  est.error_bound = se;
  est.method = "mc";
  return est;
}

double fraenkel_asymmetry(const Domain& E, const GridSpec& grid, int workers) {
  if (!E.bounded()) throw domain_error("fraenkel_asymmetry: E must be bounded");
  const int dim = E.dim;
  Box window = snap_window(grid.window, 2.0 * grid.h);
  auto inside = [&](const Vec& p) { return E.contains(p); };
  RasterField fe = rasterize(inside, window, grid.h, dim, workers);
  CoarseField ce = coarsen(fe);
  double mass = 0.0;
  for (double v : ce.occ) mass += v;
  double cellvol = std::pow(ce.h, dim);
  double volE = mass * cellvol;
  if (volE <= 0.0) throw domain_error("fraenkel_asymmetry: set has zero measure");
  double rE = std::pow(volE / unit_ball_volume(dim), 1.0 / dim);

  auto overlap_at = [&](const Vec& c0) {
    // overlap mass of E with B_rE(c0) on the same grid
    double acc = 0.0;
    const int nz = dim == 3 ? ce.nc[2] : 1;
    int i0 = std::max(0, int((c0[0] - rE - window.lo[0]) / ce.h) - 1);
    int i1 = std::min(ce.nc[0], int((c0[0] + rE - window.lo[0]) / ce.h) + 2);
    int j0 = std::max(0, int((c0[1] - rE - window.lo[1]) / ce.h) - 1);
    int j1 = std::min(ce.nc[1], int((c0[1] + rE - window.lo[1]) / ce.h) + 2);
    for (int k = 0; k < nz; ++k)
      for (int j = j0; j < j1; ++j)
        for (int i = i0; i < i1; ++i) {
          double occ = ce.occ[size_t(ce.index(i, j, k))];
          if (occ <= 0.0) continue;
          Vec x = Vec::zero(dim);
          x[0] = window.lo[0] + (i + 0.5) * ce.h;
          x[1] = window.lo[1] + (j + 0.5) * ce.h;
          if (dim == 3) x[2] = window.lo[2] + (k + 0.5) * ce.h;
          double d = (x - c0).norm();
          // fractional ball coverage of the cell, smoothed across the shell
          double half = 0.5 * ce.h * std::sqrt(double(dim));
          double covered = d <= rE - half ? 1.0 : d >= rE + half ? 0.0
                                       : (rE + half - d) / (2.0 * half);
          acc += occ * covered;
        }
    return acc * cellvol;
  };

  // coarse scan over grid-aligned centres, then local refinement
  Vec best = Vec::zero(dim);
  double best_overlap = -1.0;
  {
    const int nz = dim == 3 ? ce.nc[2] : 1;
    for (int k = 0; k < nz; k += 2)
      for (int j = 0; j < ce.nc[1]; j += 2)
        for (int i = 0; i < ce.nc[0]; i += 2) {
          if (ce.occ[size_t(ce.index(i, j, k))] <= 0.0) continue;
          Vec c = Vec::zero(dim);
          c[0] = window.lo[0] + (i + 0.5) * ce.h;
          c[1] = window.lo[1] + (j + 0.5) * ce.h;
          if (dim == 3) c[2] = window.lo[2] + (k + 0.5) * ce.h;
          double ov = overlap_at(c);
          if (ov > best_overlap) {
            best_overlap = ov;
            best = c;
          }
        }
  }
  double step = ce.h;
  for (int level = 0; level < 6; ++level) {
    bool improved = true;
    while (improved) {
      improved = false;
      for (int d = 0; d < dim; ++d)
        for (double sgn : {-1.0, 1.0}) {
          Vec c = best;
          c[d] += sgn * step;
          double ov = overlap_at(c);
          if (ov > best_overlap) {
            best_overlap = ov;
            best = c;
            improved = true;
          }
        }
    }
    step *= 0.5;
  }
  double a = (2.0 * volE - 2.0 * best_overlap) / volE;  // |B| built to match |E|
  return std::max(0.0, a);
}

double ball_perimeter_reference(const FracParams& params, double radius) {
  const int N = params.dim;
  return N * unit_ball_volume(N) * eigenvalue(params, 1) /
         (params.s * (N - 2.0 * params.s)) * std::pow(radius, N - 2.0 * params.s);
}

double ball_perimeter_volumetric(const FracParams& params, double radius) {
  const int N = params.dim;
  const double two_s = 2.0 * params.s;
  const double R = radius;
  if (N == 3) {
    // covariogram of the ball is polynomial: closed form
    double lead = 4.0 * M_PI *
                  (M_PI * R * R * std::pow(2.0 * R, 1.0 - two_s) / (1.0 - two_s) -
                   (M_PI / 12.0) * std::pow(2.0 * R, 3.0 - two_s) / (3.0 - two_s));
    double tail = 4.0 * M_PI * (4.0 * M_PI / 3.0) * R * R * R *
                  std::pow(2.0 * R, -two_s) / two_s;
    return lead + tail;
  }
  // N=2: |B| - g(r) with r = 2R sin(tau) becomes R^2 (2 tau + sin 2 tau)
  auto f = [&](double tau) {
    double r = 2.0 * R * std::sin(tau);
    double miss = R * R * (2.0 * tau + std::sin(2.0 * tau));
    return 2.0 * M_PI * std::pow(r, -1.0 - two_s) * miss * 2.0 * R * std::cos(tau);
  };
  double v = integrate_power_weighted(f, 0.0, 0.5 * M_PI, two_s, 22);
  v += 2.0 * M_PI * M_PI * R * R * std::pow(2.0 * R, -two_s) / two_s;
  return v;
}

GammaProbeReport gamma_limit_probe(const Domain& E, const std::vector<double>& s_list,
                                   const GridSpec& grid, double classical_perimeter,
                                   int workers) {
  GammaProbeReport rep;
  const int dim = E.dim;
  for (double s : s_list) {
    FracParams p(dim, s);
    double value;
    if (E.kind == DomainKind::ball) {
      value = ball_perimeter_volumetric(p, E.radius * E.dilation);
    } else {
      value = perimeter_grid(E, p, grid, workers).value;
    }
    rep.rows.push_back({s, value, (1.0 - 2.0 * s) * value});
  }
  // linear fit of scaled values in x = 1/2 - s, extrapolated to x = 0
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  size_t n = rep.rows.size();
  for (const auto& r : rep.rows) {
    double x = 0.5 - r.s;
    sx += x;
    sy += r.scaled;
    sxx += x * x;
    sxy += x * r.scaled;
  }
  if (n >= 2) {
    double slope = (double(n) * sxy - sx * sy) / (double(n) * sxx - sx * sx);
    double intercept = (sy - slope * sx) / double(n);
    rep.extrapolated_limit = intercept;
  } else if (n == 1) {
    rep.extrapolated_limit = rep.rows[0].scaled;
  }
  rep.reference = unit_ball_volume(dim - 1) * classical_perimeter;
  return rep;
}

}  // namespace fracperim
