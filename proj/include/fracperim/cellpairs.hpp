#pragma once

#include <array>
#include <string>

#include "fracperim/core.hpp"

namespace fracperim {

/// Exact kernel integral over a pair of unit cells at integer offset d:
///   W(d) = int_{[0,1]^N} int_{d + [0,1]^N} |x - y|^{-(N+2s)} dx dy,
/// computed through the overlap-tent reduction
///   W(d) = int |u|^{-(N+2s)} prod_i tent(u_i - d_i) du
/// with graded tensor-product Gauss panels near the touching corner.
/// Physical cells of size h scale as h^{N-2s} W(d). d = 0 is divergent and
/// rejected. Results are cached in memory, keyed by (N, s, sorted |d|), and
/// persisted under $FRACPERIM_CACHE when set.
double unit_cell_pair_integral(int dim, double s, std::array<int, 3> offset);

/// Load / store the in-memory cache for a given (dim, s) from the cache dir.
/// No-ops when FRACPERIM_CACHE is unset.
void load_cellpair_cache(int dim, double s);
void save_cellpair_cache(int dim, double s);

}  // namespace fracperim
