#include "fracperim/quadrature.hpp"

#include <gsl/gsl_integration.h>

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <mutex>

#include "fracperim/core.hpp"

namespace fracperim {

namespace {

// GSL fixed-order tables on [0,1], cached per order.
const gsl_integration_glfixed_table* table_for(int n) {
  static std::map<int, gsl_integration_glfixed_table*> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) {
    it = cache.emplace(n, gsl_integration_glfixed_table_alloc(size_t(n))).first;
  }
  return it->second;
}

}  // namespace

Quad1D gauss_legendre(int n, double a, double b) {
  if (n <= 0) throw domain_error("gauss_legendre: n must be positive");
  const auto* t = table_for(n);
  Quad1D q;
  q.x.resize(size_t(n));
  q.w.resize(size_t(n));
  for (int i = 0; i < n; ++i) {
    gsl_integration_glfixed_point(a, b, size_t(i), &q.x[size_t(i)], &q.w[size_t(i)],
                                  t);
  }
  return q;
}

double integrate_gl(const std::function<double(double)>& f, double a, double b,
                    int n) {
  if (b <= a) return 0.0;
  Quad1D q = gauss_legendre(n, a, b);
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += q.w[size_t(i)] * f(q.x[size_t(i)]);
  return s;
}

double integrate_left_singular(const std::function<double(double)>& f, double a,
                               double b, double alpha, int n) {
  if (b <= a) return 0.0;
  if (!(alpha > 0.0 && alpha < 1.0))
    throw domain_error("integrate_left_singular: alpha must be in (0,1)");
  // u = a + v^{1/(1-alpha)};  du = q v^{q-1} dv with q = 1/(1-alpha).
  // f(u)(u-a)^{alpha} is smooth, and (u-a)^{-alpha} du = q dv exactly.
  const double q = 1.0 / (1.0 - alpha);
  const double vmax = std::pow(b - a, 1.0 - alpha);
  Quad1D g = gauss_legendre(n, 0.0, vmax);
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    double v = g.x[size_t(i)];
    double u = a + std::pow(v, q);
    double phi = f(u) * std::pow(u - a, alpha);  // smooth part
    s += g.w[size_t(i)] * q * phi;
  }
  return s;
}

double integrate_panels(const std::function<double(double)>& f,
                        const std::vector<double>& knots, int n_per_panel) {
  double s = 0.0;
  for (size_t i = 0; i + 1 < knots.size(); ++i)
    s += integrate_gl(f, knots[i], knots[i + 1], n_per_panel);
  return s;
}

double integrate_power_weighted(const std::function<double(double)>& f, double a,
                                double b, double alpha, int n) {
  if (b <= a) return 0.0;
  if (!(alpha > 0.0 && alpha < 1.0))
    throw domain_error("integrate_power_weighted: alpha must be in (0,1)");
  if (a == 0.0) {
    // Interpolate the smooth factor f(u) u^{alpha} at Chebyshev nodes in
    // tau = u/b and integrate the monomial moments against u^{-alpha}
    // exactly. Degree is capped for Vandermonde conditioning.
    const int m = std::min(n, 22);
    Eigen::MatrixXd V(m, m);
    Eigen::VectorXd y(m);
    for (int i = 0; i < m; ++i) {
      double tau = 0.5 * (1.0 + std::cos(M_PI * (2.0 * i + 1.0) / (2.0 * m)));
      double u = b * tau;
      double t = 1.0;
      for (int j = 0; j < m; ++j) {
        V(i, j) = t;
        t *= tau;
      }
      y(i) = f(u) * std::pow(u, alpha);
    }
    Eigen::VectorXd c = V.fullPivLu().solve(y);
    double s = 0.0;
    for (int j = 0; j < m; ++j)
      s += c(j) * std::pow(b, 1.0 - alpha) / (double(j) + 1.0 - alpha);
    return s;
  }
  // Away from zero the weight is smooth; absorb it with the power
  // substitution v = u^{1-alpha} and integrate with GL.
  const double q = 1.0 / (1.0 - alpha);
  Quad1D g = gauss_legendre(n, std::pow(a, 1.0 - alpha), std::pow(b, 1.0 - alpha));
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    double v = g.x[size_t(i)];
    double u = std::pow(v, q);
    s += g.w[size_t(i)] * q * f(u) * std::pow(u, alpha);
  }
  return s;
}

double integrate_gl_cosmap(const std::function<double(double)>& f, double a,
                           double b, int n) {
  if (b <= a) return 0.0;
  Quad1D g = gauss_legendre(n, 0.0, 1.0);
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    double t = g.x[size_t(i)];
    double u = a + (b - a) * 0.5 * (1.0 - std::cos(M_PI * t));
    double jac = (b - a) * 0.5 * M_PI * std::sin(M_PI * t);
    s += g.w[size_t(i)] * jac * f(u);
  }
  return s;
}

}  // namespace fracperim
