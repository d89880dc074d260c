#include "fracperim/harmonics.hpp"

#include <cmath>

#include "fracperim/quadrature.hpp"
#include "fracperim/specfun.hpp"

namespace fracperim {

namespace {

void check_unit(const Vec& p) {
  if (std::abs(p.norm() - 1.0) > 1e-12)
    throw domain_error("harmonics: point must lie on the unit sphere");
}

// Fully-normalized associated Legendre values Q_{l,m} (Condon-Shortley phase
// included), l = 0..L, via the standard stable column recurrence.
// Q_{l,m} * {1, sqrt(2) cos(m phi), sqrt(2) sin(m phi)} is orthonormal on S^2.
void normalized_assoc_legendre(int L, double ct, double st,
                               std::vector<double>& Q /* size (L+1)(L+2)/2 */) {
  auto at = [L](int l, int m) { return m * (2 * L + 3 - m) / 2 + (l - m); };
  Q.assign(size_t((L + 1) * (L + 2) / 2), 0.0);
  Q[size_t(at(0, 0))] = std::sqrt(1.0 / (4.0 * M_PI));
  for (int m = 1; m <= L; ++m)
    Q[size_t(at(m, m))] =
        -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * st * Q[size_t(at(m - 1, m - 1))];
  for (int m = 0; m < L; ++m)
    Q[size_t(at(m + 1, m))] = std::sqrt(2.0 * m + 3.0) * ct * Q[size_t(at(m, m))];
  for (int m = 0; m <= L; ++m) {
    for (int l = m + 2; l <= L; ++l) {
      double a = std::sqrt((4.0 * l * l - 1.0) / (double(l) * l - double(m) * m));
      double b = std::sqrt((double(l - 1) * (l - 1) - double(m) * m) /
                           (4.0 * double(l - 1) * (l - 1) - 1.0));
      Q[size_t(at(l, m))] =
          a * (ct * Q[size_t(at(l - 1, m))] - b * Q[size_t(at(l - 2, m))]);
    }
  }
}

// Real orthonormal Y_{k,m} values at a unit point. Ordering: degree 1 is
// (x, y, z); other degrees are [m=0, m=1 cos, m=1 sin, m=2 cos, ...].
void eval_real_sph3(int L_all, int k, const Vec& p, std::vector<double>& out) {
  double ct = std::clamp(p[2], -1.0, 1.0);
  double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
  double phi = std::atan2(p[1], p[0]);
  std::vector<double> Q;
  normalized_assoc_legendre(L_all, ct, st, Q);
  auto at = [L_all](int l, int m) { return m * (2 * L_all + 3 - m) / 2 + (l - m); };
  const double sq2 = std::sqrt(2.0);
  out.clear();
  if (k == 1) {
    double c1 = -sq2 * Q[size_t(at(1, 1))] * std::cos(phi);  // ~ x
    double s1 = -sq2 * Q[size_t(at(1, 1))] * std::sin(phi);  // ~ y
    out = {c1, s1, Q[size_t(at(1, 0))]};                     // ~ z last
    return;
  }
  out.push_back(Q[size_t(at(k, 0))]);
  double sign = -1.0;  // (-1)^m
  for (int m = 1; m <= k; ++m) {
    double qc = sign * sq2 * Q[size_t(at(k, m))];
    out.push_back(qc * std::cos(m * phi));
    out.push_back(qc * std::sin(m * phi));
    sign = -sign;
  }
}

}  // namespace

std::shared_ptr<const HarmonicBasis> HarmonicBasis::build(const FracParams& params,
                                                          int max_degree,
                                                          int nodes_azimuth,
                                                          int nodes_polar) {
  if (max_degree < 1) throw domain_error("HarmonicBasis: max_degree must be >= 1");
  auto basis = std::shared_ptr<HarmonicBasis>(new HarmonicBasis(params, max_degree));
  const int N = params.dim;

  basis->offsets_.resize(size_t(max_degree) + 2, 0);
  for (int k = 0; k <= max_degree; ++k)
    basis->offsets_[size_t(k) + 1] = basis->offsets_[size_t(k)] + harmonic_dim(N, k);
  basis->size_ = basis->offsets_[size_t(max_degree) + 1];

  if (N == 2) {
    int M = nodes_azimuth > 0 ? nodes_azimuth : 256;
    if (M < 4 * max_degree + 4)
      throw domain_error("HarmonicBasis: too few nodes for requested degree");
    basis->nodes_.reserve(size_t(M));
    basis->weights_.assign(size_t(M), 2.0 * M_PI / M);
    for (int j = 0; j < M; ++j) {
      double t = 2.0 * M_PI * j / M;
      basis->nodes_.push_back(Vec(std::cos(t), std::sin(t)));
    }
  } else {
    int np = nodes_polar > 0 ? nodes_polar : 48;
    int na = nodes_azimuth > 0 ? nodes_azimuth : 96;
    if (np < max_degree + 1 || na < 2 * max_degree + 2)
      throw domain_error("HarmonicBasis: too few nodes for requested degree");
    Quad1D gl = gauss_legendre(np, -1.0, 1.0);  // in cos(polar)
    basis->nodes_.reserve(size_t(np) * size_t(na));
    basis->weights_.reserve(size_t(np) * size_t(na));
    for (int ip = 0; ip < np; ++ip) {
      double ct = gl.x[size_t(ip)];
      double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
      for (int ia = 0; ia < na; ++ia) {
        double phi = 2.0 * M_PI * ia / na;
        basis->nodes_.push_back(Vec(st * std::cos(phi), st * std::sin(phi), ct));
        basis->weights_.push_back(gl.w[size_t(ip)] * 2.0 * M_PI / na);
      }
    }
  }

  const int J = basis->node_count();
  basis->vals_.resize(size_t(J) * size_t(basis->size_));
  std::vector<double> tmp;
  for (int j = 0; j < J; ++j) {
    for (int k = 0; k <= max_degree; ++k) {
      tmp = basis->eval_degree(k, basis->node(j));
      int off = basis->block_start(k);
      for (size_t m = 0; m < tmp.size(); ++m)
        basis->vals_[size_t(j) * size_t(basis->size_) + size_t(off) + m] = tmp[m];
    }
  }
  return basis;
}

int HarmonicBasis::block_size(int k) const {
  return offsets_[size_t(k) + 1] - offsets_[size_t(k)];
}

int HarmonicBasis::degree_of(int idx) const {
  for (int k = 0; k <= max_degree_; ++k)
    if (idx < offsets_[size_t(k) + 1]) return k;
  throw domain_error("HarmonicBasis::degree_of: index out of range");
}

std::vector<double> HarmonicBasis::eval_degree(int k, const Vec& p) const {
  check_unit(p);
  std::vector<double> out;
  if (params_.dim == 2) {
    double t = std::atan2(p[1], p[0]);
    if (k == 0) {
      out = {1.0 / std::sqrt(2.0 * M_PI)};
    } else {
      double c = 1.0 / std::sqrt(M_PI);
      out = {c * std::cos(k * t), c * std::sin(k * t)};
    }
  } else {
    eval_real_sph3(max_degree_, k, p, out);
  }
  return out;
}

void HarmonicBasis::eval_all(const Vec& p, std::vector<double>& out) const {
  check_unit(p);
  out.resize(size_t(size_));
  if (params_.dim == 2) {
    double t = std::atan2(p[1], p[0]);
    out[0] = 1.0 / std::sqrt(2.0 * M_PI);
    const double c = 1.0 / std::sqrt(M_PI);
    double ct = std::cos(t), st = std::sin(t);
    double ck = 1.0, sk = 0.0;  // cos/sin of k*t by angle addition
    for (int k = 1; k <= max_degree_; ++k) {
      double cn = ck * ct - sk * st;
      double sn = sk * ct + ck * st;
      ck = cn;
      sk = sn;
      out[size_t(block_start(k))] = c * ck;
      out[size_t(block_start(k)) + 1] = c * sk;
    }
    return;
  }
  const int L = max_degree_;
  double ct = std::clamp(p[2], -1.0, 1.0);
  double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
  double phi = std::atan2(p[1], p[0]);
  std::vector<double> Q;
  normalized_assoc_legendre(L, ct, st, Q);
  auto at = [L](int l, int m) { return m * (2 * L + 3 - m) / 2 + (l - m); };
  const double sq2 = std::sqrt(2.0);
  std::vector<double> cm(size_t(L) + 1), sm(size_t(L) + 1);
  cm[0] = 1.0;
  sm[0] = 0.0;
  double cp = std::cos(phi), sp = std::sin(phi);
  for (int m = 1; m <= L; ++m) {
    cm[size_t(m)] = cm[size_t(m - 1)] * cp - sm[size_t(m - 1)] * sp;
    sm[size_t(m)] = sm[size_t(m - 1)] * cp + cm[size_t(m - 1)] * sp;
  }
  for (int k = 0; k <= L; ++k) {
    int off = block_start(k);
    if (k == 1) {
      out[size_t(off)] = -sq2 * Q[size_t(at(1, 1))] * cm[1];
      out[size_t(off) + 1] = -sq2 * Q[size_t(at(1, 1))] * sm[1];
      out[size_t(off) + 2] = Q[size_t(at(1, 0))];
      continue;
    }
    out[size_t(off)] = Q[size_t(at(k, 0))];
    double sign = -1.0;
    int idx = off + 1;
    for (int m = 1; m <= k; ++m) {
      double qc = sign * sq2 * Q[size_t(at(k, m))];
      out[size_t(idx++)] = qc * cm[size_t(m)];
      out[size_t(idx++)] = qc * sm[size_t(m)];
      sign = -sign;
    }
  }
}

double HarmonicBasis::eval(const std::vector<double>& coeffs, const Vec& p) const {
  thread_local std::vector<double> tmp;
  eval_all(p, tmp);
  double s = 0.0;
  for (int i = 0; i < size_; ++i) s += coeffs[size_t(i)] * tmp[size_t(i)];
  return s;
}

std::vector<double> HarmonicBasis::analyze(const std::vector<double>& nodal) const {
  std::vector<double> c(size_t(size_), 0.0);
  for (int j = 0; j < node_count(); ++j) {
    double fw = nodal[size_t(j)] * weights_[size_t(j)];
    const double* row = &vals_[size_t(j) * size_t(size_)];
    for (int i = 0; i < size_; ++i) c[size_t(i)] += fw * row[i];
  }
  return c;
}

std::vector<double> HarmonicBasis::synthesize(const std::vector<double>& coeffs) const {
  std::vector<double> f(size_t(node_count()), 0.0);
  for (int j = 0; j < node_count(); ++j) {
    const double* row = &vals_[size_t(j) * size_t(size_)];
    double s = 0.0;
    for (int i = 0; i < size_; ++i) s += coeffs[size_t(i)] * row[i];
    f[size_t(j)] = s;
  }
  return f;
}

double HarmonicBasis::integrate(const std::vector<double>& nodal) const {
  double s = 0.0;
  for (int j = 0; j < node_count(); ++j) s += nodal[size_t(j)] * weights_[size_t(j)];
  return s;
}

}  // namespace fracperim
