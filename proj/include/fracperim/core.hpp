#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace fracperim {

// Thrown when inputs violate a documented precondition.
class domain_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Thrown when an algorithm fails to converge or a computation breaks down.
class numeric_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Kernel parameters: ambient dimension N in {2,3} and fractional order
/// s in (0, 1/2). Every kernel in the library is |x-y|^-(N+2s).
struct FracParams {
  int dim;
  double s;

  FracParams(int dim_, double s_) : dim(dim_), s(s_) {
    if (dim < 2 || dim > 3)
      throw domain_error("FracParams: dim must be 2 or 3, got " + std::to_string(dim_));
    if (!(s > 0.0 && s < 0.5))
      throw domain_error("FracParams: s must lie strictly in (0, 1/2), got " +
                         std::to_string(s_));
  }

  double kernel_exponent() const { return dim + 2.0 * s; }
};

/// Small fixed-capacity vector for points in R^2 / R^3.
struct Vec {
  std::array<double, 3> v{0.0, 0.0, 0.0};
  int dim = 2;

  Vec() = default;
  Vec(double x, double y) : v{x, y, 0.0}, dim(2) {}
  Vec(double x, double y, double z) : v{x, y, z}, dim(3) {}
  static Vec zero(int d) {
    Vec p;
    p.dim = d;
    return p;
  }

  double& operator[](int i) { return v[size_t(i)]; }
  double operator[](int i) const { return v[size_t(i)]; }

  Vec operator+(const Vec& o) const {
    Vec r = *this;
    for (int i = 0; i < dim; ++i) r.v[size_t(i)] += o.v[size_t(i)];
    return r;
  }
  Vec operator-(const Vec& o) const {
    Vec r = *this;
    for (int i = 0; i < dim; ++i) r.v[size_t(i)] -= o.v[size_t(i)];
    return r;
  }
  Vec operator*(double a) const {
    Vec r = *this;
    for (int i = 0; i < dim; ++i) r.v[size_t(i)] *= a;
    return r;
  }
  Vec operator/(double a) const { return *this * (1.0 / a); }

  double dot(const Vec& o) const {
    double s = 0.0;
    for (int i = 0; i < dim; ++i) s += v[size_t(i)] * o.v[size_t(i)];
    return s;
  }
  double norm2() const { return dot(*this); }
  double norm() const { return std::sqrt(norm2()); }
  Vec normalized() const {
    double n = norm();
    if (n == 0.0) throw domain_error("Vec::normalized: zero vector");
    return *this / n;
  }
};

inline Vec operator*(double a, const Vec& p) { return p * a; }

/// Axis-aligned box, used for bounding boxes and grid windows.
struct Box {
  Vec lo, hi;

  int dim() const { return lo.dim; }
  double side(int i) const { return hi[i] - lo[i]; }
  double diameter() const {
    double d2 = 0.0;
    for (int i = 0; i < dim(); ++i) d2 += side(i) * side(i);
    return std::sqrt(d2);
  }
  double volume() const {
    double v = 1.0;
    for (int i = 0; i < dim(); ++i) v *= side(i);
    return v;
  }
  bool contains(const Vec& p) const {
    for (int i = 0; i < dim(); ++i)
      if (p[i] < lo[i] || p[i] > hi[i]) return false;
    return true;
  }
  Box scaled(double a) const { return Box{lo * a, hi * a}; }
  Box padded(double m) const {
    Box b = *this;
    for (int i = 0; i < dim(); ++i) {
      b.lo[i] -= m;
      b.hi[i] += m;
    }
    return b;
  }
};

// SplitMix64: used to derive independent sub-seeds (per stratum, per worker)
// from a user seed, so results do not depend on worker count.
inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline uint64_t derive_seed(uint64_t seed, uint64_t stream) {
  uint64_t st = seed ^ (0x6a09e667f3bcc909ULL + stream * 0x9e3779b97f4a7c15ULL);
  return splitmix64(st);
}

/// Deterministic parallel map: the index range is split into fixed chunks and
/// results are combined in index order, so output is independent of nthreads.
void parallel_for(int64_t n, const std::function<void(int64_t, int64_t)>& chunk_fn,
                  int nthreads);

/// Deterministic parallel sum: terms are grouped into fixed blocks, block sums
/// are computed independently and reduced in block order. The result is
/// bit-identical for any worker count.
double parallel_sum(int64_t n, const std::function<double(int64_t)>& term,
                    int nthreads);

/// Global default worker count (set by the CLI --workers flag).
int default_workers();
void set_default_workers(int n);

}  // namespace fracperim
