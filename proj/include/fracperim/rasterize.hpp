#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "fracperim/core.hpp"

namespace fracperim {

/// Grid description for the pair-sum perimeter estimator.
struct GridSpec {
  double h = 0.01;
  Box window;
  int near_field_rings = 3;  // exact cell-pair integrals within this ring
};

/// Expand `b.hi` so every side is an integer multiple of h.
Box snap_window(Box b, double h);

/// Fine-resolution occupancy raster. The fine factor is 4 for N=2 and 2 for
/// N=3; boundary cells carry fractional occupancy from 4^N-fold subsampling
/// (two refinement levels for N=3).
struct RasterField {
  int dim = 2;
  int fine = 4;             // fine cells per coarse cell per axis
  double hf = 0.0;          // fine cell size
  Box window;
  std::array<int, 3> nf{1, 1, 1};
  std::vector<float> occ;   // fine occupancy in [0,1]

  int64_t index(int i, int j, int k) const {
    return i + int64_t(nf[0]) * (j + int64_t(nf[1]) * k);
  }
  double mass() const;  // sum occ * hf^dim
};

int fine_factor(int dim);

RasterField rasterize(const std::function<bool(const Vec&)>& inside,
                      const Box& window, double h, int dim, int workers = 0);

/// Coarse view of a fine raster: occupancy means and mixed-cell flags.
struct CoarseField {
  int dim = 2;
  double h = 0.0;
  std::array<int, 3> nc{1, 1, 1};
  std::vector<double> occ;
  std::vector<uint8_t> mixed;
  int64_t index(int i, int j, int k) const {
    return i + int64_t(nc[0]) * (j + int64_t(nc[1]) * k);
  }
};

CoarseField coarsen(const RasterField& f);

}  // namespace fracperim
