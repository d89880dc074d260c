#include "fracperim/curvature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "fracperim/potential.hpp"
#include "fracperim/quadrature.hpp"
#include "fracperim/specfun.hpp"

namespace fracperim {

namespace {

// ---------------------------------------------------------------------------
// N = 2: shells centred at the evaluation point, exact angular crossings.
// ---------------------------------------------------------------------------

// Fourier view of 1 + w for fast evaluation on the circle.
struct RadiusFourier {
  double a0 = 0.0;                   // constant term of w (already scaled)
  std::vector<double> ak, bk;        // cos/sin coefficients of w, degree 1..L
  double radius(double phi) const {
    double r = 1.0 + a0;
    double ck = 1.0, sk = 0.0;
    double c = std::cos(phi), s = std::sin(phi);
    for (size_t k = 0; k < ak.size(); ++k) {
      double cn = ck * c - sk * s;
      double sn = sk * c + ck * s;
      ck = cn;
      sk = sn;
      r += ak[k] * ck + bk[k] * sk;
    }
    return r;
  }
  double dradius(double phi) const {
    double d = 0.0;
    double ck = 1.0, sk = 0.0;
    double c = std::cos(phi), s = std::sin(phi);
    for (size_t k = 0; k < ak.size(); ++k) {
      double cn = ck * c - sk * s;
      double sn = sk * c + ck * s;
      ck = cn;
      sk = sn;
      double kk = double(k + 1);
      d += -ak[k] * kk * sk + bk[k] * kk * ck;
    }
    return d;
  }
};

RadiusFourier fourier_of(const StarSurface& surf) {
  const HarmonicBasis& b = surf.basis();
  RadiusFourier f;
  const auto& c = surf.coeffs();
  f.a0 = c[0] / std::sqrt(2.0 * M_PI);
  const double inv_sqrt_pi = 1.0 / std::sqrt(M_PI);
  int L = b.max_degree();
  f.ak.resize(size_t(L));
  f.bk.resize(size_t(L));
  for (int k = 1; k <= L; ++k) {
    f.ak[size_t(k - 1)] = c[size_t(b.block_start(k))] * inv_sqrt_pi;
    f.bk[size_t(k - 1)] = c[size_t(b.block_start(k)) + 1] * inv_sqrt_pi;
  }
  return f;
}

double wrap_2pi(double a) {
  a = std::fmod(a, 2.0 * M_PI);
  return a < 0.0 ? a + 2.0 * M_PI : a;
}

// Signed angular measure of (shell \ E) minus (shell cap E) on |y - x| = r.
// g(alpha) > 0 means the shell point lies outside E.
double signed_shell_measure_2d(const RadiusFourier& rf, double x0, double x1,
                               double r, int n_scan) {
  auto g = [&](double alpha) {
    double p0 = x0 + r * std::cos(alpha);
    double p1 = x1 + r * std::sin(alpha);
    double rr = std::sqrt(p0 * p0 + p1 * p1);
    double phi = std::atan2(p1, p0);
    return rr - rf.radius(phi);
  };
  std::vector<double> cross;
  double prev = g(0.0);
  for (int i = 1; i <= n_scan; ++i) {
    double a1 = 2.0 * M_PI * i / n_scan;
    double cur = g(a1);
    if ((prev > 0.0) != (cur > 0.0)) {
      double lo = 2.0 * M_PI * (i - 1) / n_scan, hi = a1;
      bool lo_pos = prev > 0.0;
      for (int it = 0; it < 48; ++it) {
        double mid = 0.5 * (lo + hi);
        if ((g(mid) > 0.0) == lo_pos)
          lo = mid;
        else
          hi = mid;
      }
      cross.push_back(0.5 * (lo + hi));
    }
    prev = cur;
  }
  if (cross.empty()) return g(0.0) > 0.0 ? 2.0 * M_PI : -2.0 * M_PI;
  std::sort(cross.begin(), cross.end());
  double mu = 0.0;
  for (size_t i = 0; i < cross.size(); ++i) {
    double a = cross[i];
    double b = (i + 1 < cross.size()) ? cross[i + 1] : cross[0] + 2.0 * M_PI;
    double mid = wrap_2pi(0.5 * (a + b));
    mu += (g(mid) > 0.0 ? 1.0 : -1.0) * (b - a);
  }
  return mu;
}

// Distances from x to the critical points of |boundary - x| (local extrema of
// the distance along the curve), used as radial panel knots.
std::vector<double> critical_radii_2d(const RadiusFourier& rf, double t0, double x0,
                                      double x1) {
  auto fprime = [&](double phi) {
    double r = rf.radius(phi), dr = rf.dradius(phi);
    // d/dphi |y(phi) - x|^2 with x = R0 (cos t0, sin t0)
    double R0 = rf.radius(t0);
    return 2.0 * (r * dr - R0 * (dr * std::cos(phi - t0) - r * std::sin(phi - t0)));
  };
  auto dist = [&](double phi) {
    double r = rf.radius(phi);
    double y0 = r * std::cos(phi) - x0, y1 = r * std::sin(phi) - x1;
    return std::sqrt(y0 * y0 + y1 * y1);
  };
  std::vector<double> out;
  const int n = 512;
  double prev = fprime(t0);
  for (int i = 1; i <= n; ++i) {
    double phi = t0 + 2.0 * M_PI * i / n;
    double cur = fprime(phi);
    if ((prev > 0.0) != (cur > 0.0)) {
      double lo = t0 + 2.0 * M_PI * (i - 1) / n, hi = phi;
      bool lo_pos = prev > 0.0;
      for (int it = 0; it < 48; ++it) {
        double mid = 0.5 * (lo + hi);
        if ((fprime(mid) > 0.0) == lo_pos)
          lo = mid;
        else
          hi = mid;
      }
      out.push_back(dist(0.5 * (lo + hi)));
    }
    prev = cur;
  }
  std::sort(out.begin(), out.end());
  return out;
}

CurvatureSample mean_curvature_2d(const StarSurface& surf, const FracParams& params,
                                  const Vec& theta, const CurvatureSpec& spec) {
  const double two_s = 2.0 * params.s;
  RadiusFourier rf = fourier_of(surf);
  double t0 = std::atan2(theta[1], theta[0]);
  double R0 = rf.radius(t0);
  double x0 = R0 * std::cos(t0), x1 = R0 * std::sin(t0);

  auto mu = [&](double r) {
    return signed_shell_measure_2d(rf, x0, x1, r, spec.angular_scan);
  };

  const double r0 = spec.inner_cutoff;

  // inner shells: even-order extrapolation of mu(r)/r
  const int ns = std::max(4, spec.extrapolation_shells);
  Eigen::MatrixXd A(ns, 3);
  Eigen::VectorXd y(ns);
  for (int j = 1; j <= ns; ++j) {
    double r = r0 * j / ns;
    double v = mu(r) / r;
    A(j - 1, 0) = 1.0;
    A(j - 1, 1) = r * r;
    A(j - 1, 2) = r * r * r * r;
    y(j - 1) = v;
  }
  Eigen::Vector3d coef = (A.transpose() * A).ldlt().solve(A.transpose() * y);
  double near = coef(0) * std::pow(r0, 1.0 - two_s) / (1.0 - two_s) +
                coef(1) * std::pow(r0, 3.0 - two_s) / (3.0 - two_s) +
                coef(2) * std::pow(r0, 5.0 - two_s) / (5.0 - two_s);

  // radial integration up to the farthest boundary point, then the exact tail
  std::vector<double> crit = critical_radii_2d(rf, t0, x0, x1);
  double rho_max = crit.empty() ? (R0 + surf.max_radius()) : crit.back();
  auto integrand = [&](double r) { return mu(r) * std::pow(r, -1.0 - two_s); };

  // the r^{-2s} weight band below the first distance extremum
  double band_end = 0.3;
  for (double c : crit)
    if (c > r0 * 1.0001) {
      band_end = std::min(band_end, 0.999 * c);
      break;
    }
  band_end = std::max(band_end, 2.0 * r0);
  double far = integrate_power_weighted(integrand, r0, band_end, two_s, 48);

  std::vector<double> knots{band_end};
  for (double c : crit)
    if (c > band_end * 1.0001 && c < rho_max * 0.999999) knots.push_back(c);
  knots.push_back(rho_max);
  std::sort(knots.begin(), knots.end());
  std::vector<double> refined;
  for (size_t i = 0; i + 1 < knots.size(); ++i) {
    refined.push_back(knots[i]);
    if (knots[i + 1] - knots[i] > 0.6)
      refined.push_back(0.5 * (knots[i] + knots[i + 1]));
  }
  refined.push_back(knots.back());
  // square-root kinks of mu at the distance extrema: cosine-stretched GL
  for (size_t i = 0; i + 1 < refined.size(); ++i)
    far += integrate_gl_cosmap(integrand, refined[i], refined[i + 1], spec.panel_gl);
  far += 2.0 * M_PI * std::pow(rho_max, -two_s) / two_s;

  CurvatureSample out;
  out.theta = theta;
  out.x = surf.center() + theta * R0;
  out.near_field = near;
  out.far_field = far;
  out.complement = 0.0;
  out.value = near + far;
  return out;
}

// ---------------------------------------------------------------------------
// N = 3: shells centred at the star centre; the boundary is the graph 1 + w.
// ---------------------------------------------------------------------------

// Radial kernel g(rho) = rho^{N-1} (R0^2 + rho^2 - 2 R0 rho c)^{-(N+2s)/2}
struct RadialKernel {
  double R0, c, expo;
  int N;
  double operator()(double rho) const {
    double d2 = R0 * R0 + rho * rho - 2.0 * R0 * rho * c;
    return std::pow(rho, N - 1) * std::pow(d2, -0.5 * expo);
  }
};

// J(gamma, R0, R0): signed radial integral for the round sphere of radius R0,
//   PV int_0^inf sign(rho - R0) rho^{N-1} (R0^2 + rho^2 - 2 R0 rho c)^{-(N+2s)/2}.
// Pairing rho = R0 e^{u} with rho = R0 e^{-u} cancels the sign analytically:
//   J = R0^{-2s} int_0^inf (e^{Nu} - e^{2su}) (1 + e^{2u} - 2 e^u c)^{-(N+2s)/2} du
// whose integrand is positive and smooth away from the u ~ gamma peak.
double round_radial_integral(double R0, double cgam, double sgam, int N, double s,
                             double far_radius, int gl) {
  const double two_s = 2.0 * s;
  const double beta = 0.5 * (N + two_s);
  auto f = [&](double u) {
    double eu = std::exp(u);
    double q = 1.0 + eu * eu - 2.0 * eu * cgam;
    return (std::pow(eu, N) - std::pow(eu, two_s)) * std::pow(q, -beta);
  };
  double g = std::max(1e-4, std::abs(sgam));
  // log-radial truncation: e^{umax} >> far_radius makes the 2-term tail
  // expansion error negligible even for small s
  double umax = std::max(std::log(std::max(far_radius, 10.0)), 12.0);
  std::vector<double> knots{0.0};
  for (double k : {0.5 * g, 2.0 * g, 8.0 * g, 0.5, 1.0, 2.0, 4.0, 8.0})
    if (k > 0.0 && k < umax) knots.push_back(k);
  knots.push_back(umax);
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
  double acc = 0.0;
  for (size_t i = 0; i + 1 < knots.size(); ++i)
    acc += integrate_gl(f, knots[i], knots[i + 1], gl);
  // tail beyond umax, expanded in e^{-u}
  double em = std::exp(-umax);
  acc += std::pow(em, two_s) / two_s + 2.0 * beta * cgam * std::pow(em, two_s + 1.0) / (two_s + 1.0);
  acc -= std::pow(em, double(N)) / N + 2.0 * beta * cgam * std::pow(em, double(N) + 1.0) / (N + 1.0);
  return std::pow(R0, -two_s) * acc;
}

CurvatureSample mean_curvature_3d(const StarSurface& surf, const FracParams& params,
                                  const Vec& theta, const CurvatureSpec& spec) {
  const double s = params.s;
  const double two_s = 2.0 * s;
  const int N = 3;
  double R0 = surf.radius(theta);

  // orthonormal frame {e1, e2, theta}
  Vec e1 = std::abs(theta[0]) < 0.9 ? Vec(1.0, 0.0, 0.0) : Vec(0.0, 1.0, 0.0);
  e1 = (e1 - theta * e1.dot(theta)).normalized();
  Vec e2(theta[1] * e1[2] - theta[2] * e1[1], theta[2] * e1[0] - theta[0] * e1[2],
         theta[0] * e1[1] - theta[1] * e1[0]);

  const int M = spec.ring_points;
  std::vector<double> cphi(M), sphi(M);
  for (int m = 0; m < M; ++m) {
    double phi = 2.0 * M_PI * m / M;
    cphi[size_t(m)] = std::cos(phi);
    sphi[size_t(m)] = std::sin(phi);
  }

  // I(gamma) = sin(gamma) * sum_m (2 pi / M) J(gamma, R(sigma_m))
  auto ring_value = [&](double gam) {
    double cg = std::cos(gam), sg = std::sin(gam);
    double base =
        round_radial_integral(R0, cg, sg, N, s, spec.far_radius, 24);
    RadialKernel g{R0, cg, params.kernel_exponent(), N};
    double acc = 0.0;
    for (int m = 0; m < M; ++m) {
      Vec sig = (e1 * cphi[size_t(m)] + e2 * sphi[size_t(m)]) * sg + theta * cg;
      double Rm = surf.radius(sig);
      // J(gamma, Rm) = J(gamma, R0) - 2 int_{R0}^{Rm} g
      double corr = -2.0 * integrate_gl(g, std::min(R0, Rm), std::max(R0, Rm), 6);
      if (Rm < R0) corr = -corr;
      acc += base + corr;
    }
    return sg * acc * 2.0 * M_PI / M;
  };

  const double g0 = spec.ring_inner_cutoff;
  // inner rings: even-order extrapolation of I(gamma) * gamma^{2s} towards 0
  const int ns = std::max(6, spec.extrapolation_shells);
  Eigen::MatrixXd A(ns, 3);
  Eigen::VectorXd y(ns);
  for (int j = 1; j <= ns; ++j) {
    double gam = g0 * (0.3 + 0.7 * j / ns);
    A(j - 1, 0) = 1.0;
    A(j - 1, 1) = gam * gam;
    A(j - 1, 2) = gam * gam * gam * gam;
    y(j - 1) = ring_value(gam) * std::pow(gam, two_s);
  }
  Eigen::Vector3d coef = (A.transpose() * A).ldlt().solve(A.transpose() * y);
  double near = coef(0) * std::pow(g0, 1.0 - two_s) / (1.0 - two_s) +
                coef(1) * std::pow(g0, 3.0 - two_s) / (3.0 - two_s) +
                coef(2) * std::pow(g0, 5.0 - two_s) / (5.0 - two_s);

  double far = integrate_power_weighted(ring_value, g0, 0.5, two_s, 48);
  far += integrate_panels(ring_value, {0.5, 1.5, 2.5, M_PI}, spec.panel_gl);

  CurvatureSample out;
  out.theta = theta;
  out.x = surf.center() + theta * R0;
  out.near_field = near;
  out.far_field = far;
  out.complement = 0.0;
  out.value = near + far;
  return out;
}

}  // namespace

CurvatureSample mean_curvature(const StarSurface& surface, const FracParams& params,
                               const Vec& theta, const CurvatureSpec& spec) {
  if (std::abs(theta.norm() - 1.0) > 1e-12)
    throw domain_error("mean_curvature: theta must be a unit vector");
  if (params.dim != surface.basis().dim())
    throw domain_error("mean_curvature: dimension mismatch");
  return params.dim == 2 ? mean_curvature_2d(surface, params, theta, spec)
                         : mean_curvature_3d(surface, params, theta, spec);
}

CurvatureSample mean_curvature(const StarSurface& surface, const Domain& omega,
                               const FracParams& params, const Vec& theta,
                               const CurvatureSpec& spec) {
  CurvatureSample out = mean_curvature(surface, params, theta, spec);
  if (!omega.contains(out.x))
    throw domain_error("mean_curvature: boundary point lies outside Omega");
  out.complement = -potential(omega, out.x, params);
  out.value += out.complement;
  return out;
}

std::vector<double> curvature_profile(const StarSurface& surface, const Domain* omega,
                                      const FracParams& params,
                                      const CurvatureSpec& spec, int nthreads) {
  const HarmonicBasis& basis = surface.basis();
  if (nthreads <= 0) nthreads = default_workers();
  std::vector<double> prof(size_t(basis.node_count()));
  parallel_for(
      basis.node_count(),
      [&](int64_t lo, int64_t hi) {
        for (int64_t j = lo; j < hi; ++j) {
          CurvatureSample cs =
              omega ? mean_curvature(surface, *omega, params, basis.node(int(j)), spec)
                    : mean_curvature(surface, params, basis.node(int(j)), spec);
          prof[size_t(j)] = cs.value;
        }
      },
      nthreads);
  return prof;
}

std::vector<double> ls_apply_diagonal(const HarmonicBasis& basis,
                                      const std::vector<double>& coeffs) {
  if (int(coeffs.size()) != basis.size())
    throw domain_error("ls_apply_diagonal: coefficient size mismatch");
  std::vector<double> out(coeffs.size());
  for (int k = 0; k <= basis.max_degree(); ++k) {
    double lam = eigenvalue(basis.params(), k);
    for (int m = 0; m < basis.block_size(k); ++m) {
      int idx = basis.block_start(k) + m;
      out[size_t(idx)] = lam * coeffs[size_t(idx)];
    }
  }
  return out;
}

double ls_eigenvalue_quadrature(const FracParams& params, int k) {
  if (k < 0) throw domain_error("ls_eigenvalue_quadrature: k must be >= 0");
  if (k == 0) return 0.0;
  const int N = params.dim;
  const double two_s = 2.0 * params.s;
  auto gegen = [&](double cg) {
    // P~_k with P~_k(1) = 1: cos(k gamma) on S^1, Legendre P_k on S^2
    return N == 2 ? std::cos(k * std::acos(std::clamp(cg, -1.0, 1.0)))
                  : std::legendre(unsigned(k), std::clamp(cg, -1.0, 1.0));
  };
  auto f = [&](double gam) {
    double ker = std::pow(2.0 * std::sin(0.5 * gam), -double(N) - two_s);
    double meas = N == 2 ? 2.0 : 2.0 * M_PI * std::sin(gam);
    return (1.0 - gegen(std::cos(gam))) * ker * meas;
  };
  double v = integrate_power_weighted(f, 0.0, 0.5, two_s, 96);
  v += integrate_panels(f, {0.5, 1.5, 2.5, M_PI}, 48);
  return v;
}

double ls_pointwise_quadrature(const HarmonicBasis& basis,
                               const std::vector<double>& coeffs, const Vec& theta,
                               const CurvatureSpec& spec) {
  const int N = basis.dim();
  const double two_s = 2.0 * basis.params().s;
  double f_theta = basis.eval(coeffs, theta);

  std::function<double(double)> ring_diff;  // mean of f(theta)-f(sigma) on the ring
  Vec e1, e2;
  if (N == 3) {
    e1 = std::abs(theta[0]) < 0.9 ? Vec(1.0, 0.0, 0.0) : Vec(0.0, 1.0, 0.0);
    e1 = (e1 - theta * e1.dot(theta)).normalized();
    e2 = Vec(theta[1] * e1[2] - theta[2] * e1[1], theta[2] * e1[0] - theta[0] * e1[2],
             theta[0] * e1[1] - theta[1] * e1[0]);
  }
  const int M = spec.ring_points;
  if (N == 2) {
    double t0 = std::atan2(theta[1], theta[0]);
    ring_diff = [&basis, &coeffs, f_theta, t0](double gam) {
      double fp = basis.eval(coeffs, Vec(std::cos(t0 + gam), std::sin(t0 + gam)));
      double fm = basis.eval(coeffs, Vec(std::cos(t0 - gam), std::sin(t0 - gam)));
      return f_theta - 0.5 * (fp + fm);
    };
  } else {
    ring_diff = [&basis, &coeffs, f_theta, e1, e2, theta, M](double gam) {
      double cg = std::cos(gam), sg = std::sin(gam);
      double acc = 0.0;
      for (int m = 0; m < M; ++m) {
        double phi = 2.0 * M_PI * m / M;
        Vec sig = (e1 * std::cos(phi) + e2 * std::sin(phi)) * sg + theta * cg;
        acc += basis.eval(coeffs, sig);
      }
      return f_theta - acc / M;
    };
  }

  auto integrand = [&](double gam) {
    double ker = std::pow(2.0 * std::sin(0.5 * gam), -double(N) - two_s);
    double meas = N == 2 ? 2.0 : 2.0 * M_PI * std::sin(gam);
    return ring_diff(gam) * ker * meas;
  };

  const double g0 = spec.inner_cutoff;
  // inner extrapolation of integrand * gamma^{2s}
  const int ns = std::max(4, spec.extrapolation_shells);
  Eigen::MatrixXd A(ns, 2);
  Eigen::VectorXd y(ns);
  for (int j = 1; j <= ns; ++j) {
    double gam = g0 * (0.3 + 0.7 * j / ns);
    A(j - 1, 0) = 1.0;
    A(j - 1, 1) = gam * gam;
    y(j - 1) = integrand(gam) * std::pow(gam, two_s);
  }
  Eigen::Vector2d coef = (A.transpose() * A).ldlt().solve(A.transpose() * y);
  double v = coef(0) * std::pow(g0, 1.0 - two_s) / (1.0 - two_s) +
             coef(1) * std::pow(g0, 3.0 - two_s) / (3.0 - two_s);
  v += integrate_power_weighted(integrand, g0, 0.5, two_s, 64);
  v += integrate_panels(integrand, {0.5, 1.5, 2.5, M_PI}, 32);
  return v;
}

double sphere_curvature_oracle(const FracParams& params) {
  const double s = params.s;
  const double two_s = 2.0 * s;
  if (params.dim == 3) {
    // m(r) = 2 pi r exactly: both pieces in closed form
    return 2.0 * M_PI * std::pow(2.0, 1.0 - two_s) / (1.0 - two_s) +
           4.0 * M_PI * std::pow(2.0, -two_s) / two_s;
  }
  // m(r) = 4 asin(r/2): substitute r = 2 sin(psi)
  auto f = [&](double psi) {
    return 8.0 * psi * std::cos(psi) * std::pow(2.0 * std::sin(psi), -1.0 - two_s);
  };
  double v = integrate_power_weighted(f, 0.0, 0.5 * M_PI, two_s, 96);
  v += 2.0 * M_PI * std::pow(2.0, -two_s) / two_s;
  return v;
}

LinearizationReport linearization_check(const std::vector<double>& phi_coeffs,
                                        std::shared_ptr<const HarmonicBasis> basis,
                                        const FracParams& params,
                                        const std::vector<double>& t_list,
                                        const CurvatureSpec& spec) {
  if (int(phi_coeffs.size()) != basis->size())
    throw domain_error("linearization_check: coefficient size mismatch");
  const double lam1 = eigenvalue(params, 1);
  const double d = d_const(params);

  // adopted reference: 2 (L_s - lambda_1) phi
  std::vector<double> ref_coeffs(phi_coeffs.size());
  for (int idx = 0; idx < basis->size(); ++idx) {
    int k = basis->degree_of(idx);
    ref_coeffs[size_t(idx)] =
        2.0 * (eigenvalue(params, k) - lam1) * phi_coeffs[size_t(idx)];
  }
  std::vector<double> ref = basis->synthesize(ref_coeffs);
  std::vector<double> phi_nodal = basis->synthesize(phi_coeffs);
  double ref_max = 0.0, phi_max = 0.0;
  for (double v : ref) ref_max = std::max(ref_max, std::abs(v));
  for (double v : phi_nodal) phi_max = std::max(phi_max, std::abs(v));
  double denom = std::max(ref_max, 2.0 * lam1 * phi_max);

  LinearizationReport rep;
  rep.paper_prefactor_d = d;
  rep.reference_scale = ref_max;
  for (double t : t_list) {
    std::vector<double> cp(phi_coeffs.size()), cm(phi_coeffs.size());
    for (size_t i = 0; i < phi_coeffs.size(); ++i) {
      cp[i] = t * phi_coeffs[i];
      cm[i] = -t * phi_coeffs[i];
    }
    StarSurface sp(Vec::zero(params.dim), basis, cp);
    StarSurface sm(Vec::zero(params.dim), basis, cm);
    std::vector<double> hp = curvature_profile(sp, nullptr, params, spec);
    std::vector<double> hm = curvature_profile(sm, nullptr, params, spec);
    double dev = 0.0, dev_printed = 0.0;
    std::vector<double> diff(hp.size());
    for (size_t j = 0; j < hp.size(); ++j) {
      double fd = (hp[j] - hm[j]) / (2.0 * t);
      diff[j] = fd - ref[j];
      dev = std::max(dev, std::abs(diff[j]));
      dev_printed = std::max(dev_printed, std::abs(fd - d * ref[j]));
    }
    std::vector<double> diff_coeffs = basis->analyze(diff);
    std::vector<double> per_degree(size_t(basis->max_degree()) + 1, 0.0);
    for (int idx = 0; idx < basis->size(); ++idx) {
      int k = basis->degree_of(idx);
      per_degree[size_t(k)] += diff_coeffs[size_t(idx)] * diff_coeffs[size_t(idx)];
    }
    for (double& v : per_degree) v = std::sqrt(v);
    rep.t_values.push_back(t);
    rep.max_rel_dev.push_back(dev / denom);
    rep.max_rel_dev_printed.push_back(dev_printed / denom);
    rep.per_degree_dev.push_back(per_degree);
  }
  return rep;
}

std::string LinearizationReport::to_json() const {
  nlohmann::json j;
  j["schema"] = "fracperim/linearization-v1";
  j["adopted_operator"] = "2 (L_s - lambda_1)";
  j["paper_prefactor_d"] = paper_prefactor_d;
  j["reference_scale"] = reference_scale;
  j["t"] = t_values;
  j["max_rel_dev"] = max_rel_dev;
  j["max_rel_dev_printed_prefactor"] = max_rel_dev_printed;
  j["per_degree_dev"] = per_degree_dev;
  return j.dump(2);
}

}  // namespace fracperim
