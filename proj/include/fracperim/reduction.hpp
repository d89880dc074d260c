#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fracperim/core.hpp"
#include "fracperim/curvature.hpp"
#include "fracperim/domains.hpp"
#include "fracperim/potential.hpp"

namespace fracperim {

/// Solution of the projected constant-curvature system at a fixed centre xi
/// (coordinates of Omega_eps = (1/eps) Omega):
///   vol(B(xi,w)) = omega_N,   <w, Y_i> = 0,
///   H_s^{Omega_eps}(dB(xi,w)) = c + sum_i lambda_i Y_i  (Galerkin up to L).
struct ReducedSolution {
  Vec xi;
  std::vector<double> w_coeffs;  // full basis vector, degree-1 block exactly 0
  double c = 0.0;
  std::vector<double> lambda;
  double phi = 0.0;  // P_s^{Omega_eps}(B(xi,w))
  double residual_curv = 0.0;
  double residual_vol = 0.0;
  int newton_iters = 0;
  double jac_cond = 0.0;
  std::string to_json(const Domain& omega, double eps) const;
};

struct SolverOptions {
  std::string method = "newton";  // or "picard" (the frozen-linearization map)
  int max_iters = 40;
  double curv_tol_rel = 1e-6;  // * c_{N,s}, sup-node curvature residual
  double vol_tol_rel = 1e-8;   // * omega_N
  double fd_step = 1e-6;
  bool compute_phi = true;
  CurvatureSpec curv;
  PotentialSpec pot;
  std::vector<double> init_coeffs;  // optional warm start
  int workers = 0;
};

/// Solve for (w, c, lambda) at fixed xi by damped Newton with an FD Jacobian
/// (columns scaled by the diagonal linearization 2 (lambda_k - lambda_1)), or
/// by the frozen-linearization fixed-point iteration ("picard").
ReducedSolution solve_reduction(const Domain& omega, double eps, Vec xi,
                                const FracParams& params,
                                std::shared_ptr<const HarmonicBasis> basis,
                                const SolverOptions& opts = {});

/// Phi_xi = P_s^{Omega_eps}(B(xi, w_eps)); solves first.
double reduced_functional(const Domain& omega, double eps, Vec xi,
                          const FracParams& params,
                          std::shared_ptr<const HarmonicBasis> basis,
                          const SolverOptions& opts = {});

struct CmcOptions {
  double lambda_tol = 1e-6;   // multiplier norm defining "constant curvature"
  int max_outer_iters = 12;
  double xi_fd_step = 1e-3;
  CriticalSearchOptions potential_search;
  SolverOptions solver;
  int phi_polish_evals = 0;  // optional Nelder-Mead budget on Phi before the
                             // multiplier Newton (extremal seeds only)
};

struct CmcResult {
  Vec xi;
  ReducedSolution solution;
  CriticalKind classification;  // from the FD Hessian of Phi at xi*
  bool certified = false;       // ||lambda|| <= lambda_tol reached
};

/// Locate constant-curvature centres: seeds at critical points of V_Omega
/// mapped by x0 / eps, driven to ||lambda|| = 0 by a Newton iteration on the
/// multiplier map xi -> lambda(xi) (Prop-3.4 content: zeros of lambda are
/// critical points of Phi).
std::vector<CmcResult> find_cmc(const Domain& omega, double eps,
                                const FracParams& params,
                                std::shared_ptr<const HarmonicBasis> basis,
                                const CmcOptions& opts = {});

/// Expansion diagnostics for P_s(B_1(xi), Omega_eps):
///  remainder R(eps) = omega_N V_{Omega_eps}(xi) - int_{B_1(xi)} V_{Omega_eps}
///  (the exact splitting of P_s(B_1,Omega_eps) - P_s(B_1) plus the stated
///  leading term), its log-log slope, the gradient version, and a one-point
///  cross-check against the grid estimator.
struct ExpansionReport {
  struct Row {
    double eps;
    double remainder;
    double grad_remainder;
    double lead_ratio;     // int_B V / (omega_N V(xi)) -> 1
    double scaling_check;  // |eps^{2s} V_Omega(eps xi) - V_Omega_eps(xi)| rel
  };
  std::vector<std::vector<Row>> per_point;  // [x_bar][eps]
  std::vector<double> remainder_slope;      // per x_bar
  std::vector<double> grad_slope;           // per x_bar
  double grid_cross_check_rel = 0.0;        // one-point grid vs identity route
  std::string to_json() const;
};

ExpansionReport expansion_validate(const Domain& omega,
                                   const std::vector<double>& eps_list,
                                   const std::vector<Vec>& xbar_physical,
                                   const FracParams& params,
                                   const PotentialSpec& pot = {},
                                   bool grid_check = false, int workers = 0);

}  // namespace fracperim
