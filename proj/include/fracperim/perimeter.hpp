#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fracperim/core.hpp"
#include "fracperim/domains.hpp"
#include "fracperim/rasterize.hpp"

namespace fracperim {

struct PerimeterEstimate {
  double value = 0.0;
  double error_bound = 0.0;
  std::string method;
  std::string warning;  // empty when clean
};

/// Monte Carlo spec: total pair budget split over distance strata; each
/// stratum draws the radius from the exact r^{-1-2s} density (inverse CDF)
/// restricted to the stratum, which keeps every stratum's weight constant and
/// the variance finite. An empty strata list selects distance decades of the
/// bounding-box diameter.
struct McSpec {
  int64_t samples = 1000000;
  uint64_t seed = 1;
  std::vector<double> strata;
};

/// Grid pair-sum estimator for P_s(E): exact cell-pair kernel integrals near
/// the diagonal (fine subcells across the interface), FFT-correlated midpoint
/// kernel in the far field, closed-form window tail, and Richardson
/// extrapolation in h with the known leading exponent 1-2s.
PerimeterEstimate perimeter_grid(const Domain& E, const FracParams& params,
                                 const GridSpec& grid, int workers = 0);

/// Relative perimeter P_s(E, Omega). Omega = halfspace truncates the window
/// with an analytic tail; a bounded Omega much larger than E uses the exact
/// splitting P_s(E) - int_E V_Omega.
PerimeterEstimate perimeter_rel(const Domain& E, const Domain& omega,
                                const FracParams& params, const GridSpec& grid,
                                int workers = 0);

/// Stratified Monte Carlo estimator (unbiased double integral; standard
/// error reported, deterministic for a fixed seed).
PerimeterEstimate perimeter_mc(const Domain& E, const FracParams& params,
                               const McSpec& mc, int workers = 0);

/// Fraenkel asymmetry min_x |E symdiff B_rE(x)| / |E| via an FFT overlap scan
/// plus local subcell refinement.
double fraenkel_asymmetry(const Domain& E, const GridSpec& grid, int workers = 0);

struct GammaProbeRow {
  double s;
  double value;   // P_s estimate
  double scaled;  // (1 - 2s) P_s
};
struct GammaProbeReport {
  std::vector<GammaProbeRow> rows;
  double extrapolated_limit = 0.0;  // linear fit of `scaled` in (1/2 - s) at 0
  double reference = 0.0;           // omega_{N-1} * classical perimeter
};

/// (1-2s) P_s(E) trend over s_list. Ball-kind domains use the volumetric
/// potential quadrature (int_E V_E) for accuracy at s near 1/2; other shapes
/// use the grid estimator.
GammaProbeReport gamma_limit_probe(const Domain& E, const std::vector<double>& s_list,
                                   const GridSpec& grid, double classical_perimeter,
                                   int workers = 0);

/// P_s(B_R) in closed form: N omega_N lambda_1 / (s (N - 2s)) * R^{N-2s}.
double ball_perimeter_reference(const FracParams& params, double radius = 1.0);

/// P_s(B_R) through the volumetric potential route int_B V_B dx (independent
/// quadrature used as an oracle against the closed form and the grid).
double ball_perimeter_volumetric(const FracParams& params, double radius = 1.0);

/// Pair energy of occupancy fields (shared with the halfspace module):
/// sum over x in `inner`, y in `outer` of the kernel, outer extended by
/// `tail_region` beyond the window (none, all of R^N, or the upper halfspace).
enum class TailRegion { none, all_space, halfspace };
double field_pair_energy(const RasterField& inner, const RasterField& outer,
                         const FracParams& params, int near_rings,
                         TailRegion tail, int workers = 0);

}  // namespace fracperim
