#include "fracperim/specfun.hpp"

#include <cmath>

namespace fracperim {

double gamma_fn(double x) {
  if (!(x > 0.0)) throw domain_error("gamma_fn: argument must be positive");
  return std::tgamma(x);
}

double gamma_reflected(double x) {
  if (x > 0.0) return std::tgamma(x);
  if (x == std::floor(x))
    throw domain_error("gamma_reflected: pole at non-positive integer");
  return M_PI / (std::sin(M_PI * x) * std::tgamma(1.0 - x));
}

double unit_ball_volume(int n) {
  if (n < 1) throw domain_error("unit_ball_volume: n must be >= 1");
  return std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

double sphere_area(int n) { return n * unit_ball_volume(n); }

namespace {
double binom_count(int n, int k) {
  // N_k = (n+k-1)! / ((n-1)! k!)
  if (k < 0) return 0.0;
  double r = 1.0;
  for (int j = 1; j <= k; ++j) r *= double(n + j - 1) / double(j);
  return r;
}
}  // namespace

int harmonic_dim(int N, int k) {
  if (N < 2 || N > 3) throw domain_error("harmonic_dim: N must be 2 or 3");
  if (k < 0) throw domain_error("harmonic_dim: k must be >= 0");
  return int(std::lround(binom_count(N, k) - binom_count(N, k - 2)));
}

double d_const(const FracParams& params) {
  return (1.0 - 2.0 * params.s) /
         ((params.dim - 1) * unit_ball_volume(params.dim - 1));
}

double eigenvalue(const FracParams& params, int k) {
  if (k < 0) throw domain_error("eigenvalue: k must be >= 0");
  const int N = params.dim;
  const double s = params.s;
  const double pref = std::pow(M_PI, 0.5 * (N - 1)) * std::tgamma(0.5 * (1.0 - 2.0 * s)) /
                      ((1.0 + 2.0 * s) * std::pow(2.0, 2.0 * s) *
                       std::tgamma(0.5 * (N + 2.0 * s)));
  auto ratio = [&](int kk) {
    return std::tgamma(0.5 * (2.0 * kk + N + 2.0 * s)) /
           gamma_reflected(0.5 * (2.0 * kk + N - 2.0 * s - 2.0));
  };
  if (k == 0) return 0.0;  // the two ratios coincide at k = 0
  return pref * (ratio(k) - ratio(0));
}

double sphere_curvature_const(const FracParams& params) {
  return eigenvalue(params, 1) / params.s;
}

}  // namespace fracperim
