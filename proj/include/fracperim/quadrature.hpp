#pragma once

#include <functional>
#include <vector>

namespace fracperim {

struct Quad1D {
  std::vector<double> x;
  std::vector<double> w;
};

/// Gauss-Legendre rule with n points on [a, b].
Quad1D gauss_legendre(int n, double a, double b);

/// Integrate a smooth function on [a, b] with an n-point GL rule.
double integrate_gl(const std::function<double(double)>& f, double a, double b, int n);

/// Integrate f on [a, b] where f(u) ~ (u-a)^{-alpha} * (smooth) with
/// alpha in (0, 1). The substitution v = (u-a)^{1-alpha} absorbs the weight
/// exactly; the transformed integrand is evaluated with a GL rule.
double integrate_left_singular(const std::function<double(double)>& f, double a,
                               double b, double alpha, int n);

/// Panel-composite GL over the sorted knot list.
double integrate_panels(const std::function<double(double)>& f,
                        const std::vector<double>& knots, int n_per_panel);

/// Integrate f on [a, b], 0 <= a < b, where f(u) = u^{-alpha} * (smooth);
/// the substitution v = u^{1-alpha} absorbs the algebraic weight exactly.
double integrate_power_weighted(const std::function<double(double)>& f, double a,
                                double b, double alpha, int n);

/// Integrate a smooth function whose derivative may have square-root kinks at
/// the panel ends: cosine-stretched GL (nodes cluster quadratically at both
/// endpoints).
double integrate_gl_cosmap(const std::function<double(double)>& f, double a,
                           double b, int n);

}  // namespace fracperim
