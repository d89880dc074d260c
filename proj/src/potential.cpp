#include "fracperim/potential.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>

#include "fracperim/quadrature.hpp"

namespace fracperim {

namespace {

struct DirSet {
  std::vector<Vec> dirs;
  std::vector<double> weights;  // sum to |S^{N-1}|
};

DirSet make_dirs(int dim, const PotentialSpec& spec) {
  DirSet ds;
  if (dim == 2) {
    int M = spec.dirs_2d;
    ds.dirs.reserve(size_t(M));
    ds.weights.assign(size_t(M), 2.0 * M_PI / M);
    for (int j = 0; j < M; ++j) {
      double t = 2.0 * M_PI * (j + 0.5) / M;
      ds.dirs.push_back(Vec(std::cos(t), std::sin(t)));
    }
  } else {
    Quad1D gl = gauss_legendre(spec.polar_3d, -1.0, 1.0);
    int na = spec.azimuth_3d;
    for (int ip = 0; ip < spec.polar_3d; ++ip) {
      double ct = gl.x[size_t(ip)];
      double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
      for (int ia = 0; ia < na; ++ia) {
        double phi = 2.0 * M_PI * (ia + 0.5) / na;
        ds.dirs.push_back(Vec(st * std::cos(phi), st * std::sin(phi), ct));
        ds.weights.push_back(gl.w[size_t(ip)] * 2.0 * M_PI / na);
      }
    }
  }
  return ds;
}

// int over the outside-segments of one ray of r^{-1-2s} dr
double ray_outside_integral(const Domain& omega, const Vec& x, const Vec& dir,
                            double two_s, double t_max) {
  std::vector<double> cr = omega.ray_crossings(x, dir, t_max);
  double acc = 0.0;
  bool inside = true;  // x is interior by precondition
  double prev = 0.0;
  for (double t : cr) {
    if (!inside) acc += (std::pow(prev, -two_s) - std::pow(t, -two_s)) / two_s;
    inside = !inside;
    prev = t;
  }
  if (!inside) {
    // outside from the last crossing onward
    acc += std::pow(prev, -two_s) / two_s;
  } else if (cr.empty() || prev < t_max) {
    // Bounded domains are exited for sure below t_max; if the parity says we
    // are still inside at t_max the crossing search failed.
    if (omega.bounded() && !omega.contains(x + dir * (t_max * 1.0000001)))
      throw numeric_error("potential: ray crossing search missed the boundary");
  }
  return acc;
}

double domain_tmax(const Domain& omega, const Vec& x) {
  if (!omega.bounded()) return 1e9;
  Box bb = omega.bounding_box();
  double t = 0.0;
  for (int i = 0; i < x.dim; ++i)
    t = std::max({t, std::abs(bb.hi[i] - x[i]), std::abs(x[i] - bb.lo[i])});
  return 2.0 * t + 1.0;
}

}  // namespace

double potential(const Domain& omega, const Vec& x, const FracParams& params,
                 const PotentialSpec& spec) {
  if (omega.dim != params.dim) throw domain_error("potential: dimension mismatch");
  if (!omega.contains(x)) throw domain_error("potential: x must lie inside Omega");
  const double two_s = 2.0 * params.s;
  DirSet ds = make_dirs(params.dim, spec);
  double t_max = domain_tmax(omega, x);
  double acc = 0.0;
  for (size_t j = 0; j < ds.dirs.size(); ++j)
    acc += ds.weights[j] * ray_outside_integral(omega, x, ds.dirs[j], two_s, t_max);
  return acc;
}

Vec potential_grad(const Domain& omega, const Vec& x, const FracParams& params,
                   double step, const PotentialSpec& spec) {
  const int N = params.dim;
  if (step <= 0.0) {
    double clearance = interior_clearance(omega, x);
    step = std::min(1e-4 * std::max(1.0, x.norm()), clearance / 8.0);
    if (step <= 0.0) throw domain_error("potential_grad: point too close to boundary");
  }
  Vec g = Vec::zero(N);
  for (int i = 0; i < N; ++i) {
    Vec xp = x, xm = x;
    xp[i] += step;
    xm[i] -= step;
    if (!omega.contains(xp) || !omega.contains(xm))
      throw domain_error("potential_grad: FD stencil exits Omega");
    g[i] = (potential(omega, xp, params, spec) - potential(omega, xm, params, spec)) /
           (2.0 * step);
  }
  return g;
}

std::vector<double> potential_hess(const Domain& omega, const Vec& x,
                                   const FracParams& params, double step,
                                   const PotentialSpec& spec) {
  const int N = params.dim;
  if (step <= 0.0) {
    double clearance = interior_clearance(omega, x);
    step = std::min(5e-3 * std::max(1.0, x.norm()), clearance / 6.0);
    if (step <= 0.0) throw domain_error("potential_hess: point too close to boundary");
  }
  auto V = [&](const Vec& p) {
    if (!omega.contains(p)) throw domain_error("potential_hess: FD stencil exits Omega");
    return potential(omega, p, params, spec);
  };
  std::vector<double> H(size_t(N) * size_t(N), 0.0);
  double v0 = V(x);
  for (int i = 0; i < N; ++i) {
    Vec xp = x, xm = x;
    xp[i] += step;
    xm[i] -= step;
    H[size_t(i) * size_t(N) + size_t(i)] = (V(xp) - 2.0 * v0 + V(xm)) / (step * step);
  }
  for (int i = 0; i < N; ++i) {
    for (int j = i + 1; j < N; ++j) {
      Vec a = x, b = x, c = x, d = x;
      a[i] += step; a[j] += step;
      b[i] += step; b[j] -= step;
      c[i] -= step; c[j] += step;
      d[i] -= step; d[j] -= step;
      double hij = (V(a) - V(b) - V(c) + V(d)) / (4.0 * step * step);
      H[size_t(i) * size_t(N) + size_t(j)] = hij;
      H[size_t(j) * size_t(N) + size_t(i)] = hij;
    }
  }
  return H;
}

std::string to_string(CriticalKind k) {
  switch (k) {
    case CriticalKind::minimum: return "min";
    case CriticalKind::maximum: return "max";
    case CriticalKind::saddle: return "saddle";
    case CriticalKind::degenerate: return "degenerate";
  }
  return "?";
}

double interior_clearance(const Domain& omega, const Vec& x, int probes) {
  if (!omega.contains(x)) return 0.0;
  const int N = omega.dim;
  double t_max = domain_tmax(omega, x);
  double best = t_max;
  auto probe = [&](const Vec& dir) {
    auto cr = omega.ray_crossings(x, dir, t_max);
    if (!cr.empty()) best = std::min(best, cr.front());
  };
  if (N == 2) {
    for (int j = 0; j < probes; ++j) {
      double t = 2.0 * M_PI * j / probes;
      probe(Vec(std::cos(t), std::sin(t)));
    }
  } else {
    int np = std::max(4, int(std::sqrt(double(probes) / 2.0)));
    int na = 2 * np;
    for (int ip = 0; ip < np; ++ip) {
      double ct = -1.0 + 2.0 * (ip + 0.5) / np;
      double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
      for (int ia = 0; ia < na; ++ia) {
        double phi = 2.0 * M_PI * ia / na;
        probe(Vec(st * std::cos(phi), st * std::sin(phi), ct));
      }
    }
  }
  return best;
}

std::vector<CriticalPointReport> find_critical_points(
    const Domain& omega, const FracParams& params, const CriticalSearchOptions& opts) {
  if (!omega.bounded())
    throw domain_error("find_critical_points: Omega must be bounded");
  const int N = params.dim;
  Box bb = omega.bounding_box();
  std::mt19937_64 rng(derive_seed(opts.seed, 0xCE11));
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  // rejection-sample interior seeds with a clearance floor
  std::vector<Vec> seeds;
  int attempts = 0;
  while (int(seeds.size()) < opts.multistart && attempts < opts.multistart * 200) {
    ++attempts;
    Vec p = Vec::zero(N);
    for (int i = 0; i < N; ++i) p[i] = bb.lo[i] + unif(rng) * bb.side(i);
    if (!omega.contains(p)) continue;
    if (interior_clearance(omega, p, 16) < opts.boundary_floor) continue;
    seeds.push_back(p);
  }

  const double scale = bb.diameter();
  std::vector<CriticalPointReport> found;
  for (const Vec& seed : seeds) {
    Vec x = seed;
    double mu = 1e-3;
    bool converged = false;
    for (int it = 0; it < opts.max_newton_iters; ++it) {
      double clearance = interior_clearance(omega, x, 32);
      if (clearance < opts.boundary_floor * 0.5) break;
      Vec g;
      std::vector<double> H;
      try {
        g = potential_grad(omega, x, params, 0.0, opts.spec);
        H = potential_hess(omega, x, params, 0.0, opts.spec);
      } catch (const domain_error&) {
        break;
      }
      double gn = g.norm();
      if (gn < opts.grad_tol * std::max(1.0, std::abs(potential(omega, x, params,
                                                               opts.spec))) /
                    scale) {
        converged = true;
        break;
      }
      Eigen::MatrixXd Hm(N, N);
      Eigen::VectorXd gv(N);
      for (int i = 0; i < N; ++i) {
        gv(i) = g[i];
        for (int j = 0; j < N; ++j) Hm(i, j) = H[size_t(i) * size_t(N) + size_t(j)];
      }
      bool stepped = false;
      for (int tries = 0; tries < 12 && !stepped; ++tries) {
        Eigen::MatrixXd A = Hm;
        // Levenberg damping; saddle points are legitimate targets, so no
        // positivity fix.
        double damp = mu * std::max(Hm.norm() / N, 1e-12);
        for (int i = 0; i < N; ++i) A(i, i) += damp;
        Eigen::VectorXd d = A.fullPivLu().solve(-gv);
        double dn = d.norm();
        double max_step = std::max(0.25 * clearance, 1e-6 * scale);
        if (dn > max_step) d *= max_step / dn;
        Vec xn = x;
        for (int i = 0; i < N; ++i) xn[i] += d(i);
        if (!omega.contains(xn)) {
          mu *= 4.0;
          continue;
        }
        Vec gn2;
        try {
          gn2 = potential_grad(omega, xn, params, 0.0, opts.spec);
        } catch (const domain_error&) {
          mu *= 4.0;
          continue;
        }
        if (gn2.norm() < gn || dn < 1e-12 * scale) {
          x = xn;
          mu = std::max(mu * 0.5, 1e-10);
          stepped = true;
          if (dn < 1e-11 * scale) converged = true;  // FD noise floor reached
        } else {
          mu *= 4.0;
        }
      }
      if (!stepped || converged) break;
    }
    // Accept points that reached the gradient tolerance (allowing for the FD
    // noise floor of the potential evaluations).
    {
      Vec gf;
      try {
        gf = potential_grad(omega, x, params, 0.0, opts.spec);
      } catch (const domain_error&) {
        continue;
      }
      double vf = std::abs(potential(omega, x, params, opts.spec));
      converged = gf.norm() < 10.0 * opts.grad_tol * std::max(1.0, vf) / scale +
                               1e-6 * vf / scale;
    }
    if (!converged) continue;

    bool dup = false;
    for (const auto& r : found)
      if ((r.location - x).norm() < opts.merge_radius) dup = true;
    if (dup) continue;

    CriticalPointReport rep;
    rep.location = x;
    rep.value = potential(omega, x, params, opts.spec);
    rep.gradient_norm = potential_grad(omega, x, params, 0.0, opts.spec).norm();
    std::vector<double> H = potential_hess(omega, x, params, 0.0, opts.spec);
    Eigen::MatrixXd Hm(N, N);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) Hm(i, j) = H[size_t(i) * size_t(N) + size_t(j)];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Hm);
    double trace = std::abs(Hm.trace());
    int pos = 0, neg = 0;
    bool degen = false;
    rep.hessian_eigs.clear();
    for (int i = 0; i < N; ++i) {
      double e = es.eigenvalues()(i);
      rep.hessian_eigs.push_back(e);
      if (std::abs(e) < opts.degeneracy_rel * trace)
        degen = true;
      else if (e > 0)
        ++pos;
      else
        ++neg;
    }
    rep.classification = degen ? CriticalKind::degenerate
                         : pos == N ? CriticalKind::minimum
                         : neg == N ? CriticalKind::maximum
                                    : CriticalKind::saddle;
    found.push_back(rep);
  }

  std::sort(found.begin(), found.end(),
            [](const CriticalPointReport& a, const CriticalPointReport& b) {
              for (int i = 0; i < a.location.dim; ++i) {
                if (a.location[i] < b.location[i] - 1e-12) return true;
                if (a.location[i] > b.location[i] + 1e-12) return false;
              }
              return false;
            });
  return found;
}

BlowupFit boundary_blowup_fit(const Domain& omega, const Vec& boundary_point,
                              const FracParams& params,
                              const std::vector<double>& d_list,
                              const PotentialSpec& spec) {
  Vec nu = omega.boundary_normal(boundary_point);
  BlowupFit fit;
  fit.distances = d_list;
  for (double d : d_list) {
    Vec x = boundary_point - nu * d;
    if (!omega.contains(x))
      throw domain_error("boundary_blowup_fit: inward point left Omega");
    fit.values.push_back(potential(omega, x, params, spec));
  }
  // slope of log V vs log d by least squares
  size_t n = d_list.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    double lx = std::log(d_list[i]), ly = std::log(fit.values[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  fit.fitted_exponent = (double(n) * sxy - sx * sy) / (double(n) * sxx - sx * sx);
  fit.monotone_increasing = true;
  for (size_t i = 0; i + 1 < n; ++i) {
    bool d_decreasing = d_list[i] > d_list[i + 1];
    double v_lo = d_decreasing ? fit.values[i] : fit.values[i + 1];
    double v_hi = d_decreasing ? fit.values[i + 1] : fit.values[i];
    if (!(v_hi > v_lo)) fit.monotone_increasing = false;
  }
  return fit;
}

}  // namespace fracperim
