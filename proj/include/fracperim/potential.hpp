#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fracperim/core.hpp"
#include "fracperim/domains.hpp"

namespace fracperim {

/// Angular resolution for the polar decomposition of V_Omega.
struct PotentialSpec {
  int dirs_2d = 512;    // uniform directions on S^1
  int polar_3d = 48;    // Gauss-Legendre nodes in cos(polar)
  int azimuth_3d = 96;  // uniform azimuth nodes
};

/// V_Omega(x) = int_{Omega^c} |x-y|^{-(N+2s)} dy for x in the interior of
/// Omega, by polar decomposition: along each direction the segments of the
/// ray lying outside Omega contribute (a^{-2s} - b^{-2s})/(2s) in closed
/// form; ray/boundary crossings are analytic for primitive kinds and
/// bisected for custom oracles. Works in physical coordinates; callers doing
/// epsilon-rescaling pass the dilated domain.
double potential(const Domain& omega, const Vec& x, const FracParams& params,
                 const PotentialSpec& spec = {});

/// Central finite differences of `potential`, step scaled to the distance
/// from the boundary. Throws if the stencil leaves Omega.
Vec potential_grad(const Domain& omega, const Vec& x, const FracParams& params,
                   double step = 0.0, const PotentialSpec& spec = {});
std::vector<double> potential_hess(const Domain& omega, const Vec& x,
                                   const FracParams& params, double step = 0.0,
                                   const PotentialSpec& spec = {});

enum class CriticalKind { minimum, maximum, saddle, degenerate };
std::string to_string(CriticalKind k);

struct CriticalPointReport {
  Vec location;
  double value;
  double gradient_norm;
  std::vector<double> hessian_eigs;
  CriticalKind classification;
};

struct CriticalSearchOptions {
  int multistart = 64;
  uint64_t seed = 1;
  double grad_tol = 1e-8;
  double merge_radius = 1e-4;
  double boundary_floor = 0.02;  // seeds keep at least this clearance
  int max_newton_iters = 80;
  double degeneracy_rel = 1e-6;  // |eig| < rel * |trace| -> degenerate
  PotentialSpec spec;
};

/// Multistart Newton (Levenberg-damped) on grad V = 0, duplicates merged,
/// survivors classified by Hessian spectrum and sorted lexicographically.
std::vector<CriticalPointReport> find_critical_points(const Domain& omega,
                                                      const FracParams& params,
                                                      const CriticalSearchOptions& opts);

struct BlowupFit {
  std::vector<double> distances;
  std::vector<double> values;
  double fitted_exponent;      // slope of log V vs log d
  bool monotone_increasing;    // V increasing as d decreases
};

/// V along the inward normal at a boundary point, with a log-log rate fit.
/// The measured exponent is -2s; the paper's printed rate differs (see
/// README notes), so the fit is reported rather than assumed.
BlowupFit boundary_blowup_fit(const Domain& omega, const Vec& boundary_point,
                              const FracParams& params,
                              const std::vector<double>& d_list,
                              const PotentialSpec& spec = {});

/// Rough interior clearance: min first-crossing distance over probe rays.
double interior_clearance(const Domain& omega, const Vec& x, int probes = 64);

}  // namespace fracperim
