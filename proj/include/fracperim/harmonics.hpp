#pragma once

#include <memory>
#include <vector>

#include "fracperim/core.hpp"

namespace fracperim {

/// Real orthonormal spherical-harmonic basis on S^{N-1} up to degree L,
/// together with a quadrature node set on which the discrete Gram matrix is
/// the identity (to ~1e-13).
///
/// N=2: Fourier basis 1/sqrt(2 pi), cos(k t)/sqrt(pi), sin(k t)/sqrt(pi) on a
/// uniform (trapezoid) angular grid.
/// N=3: real spherical harmonics on a Gauss-Legendre (polar) x uniform
/// (azimuth) product grid.
///
/// Degree-1 functions are ordered like the coordinates they restrict:
/// (x, y) for N=2 and (x, y, z) for N=3, scaled by sqrt(N / |S^{N-1}|).
class HarmonicBasis {
 public:
  static std::shared_ptr<const HarmonicBasis> build(const FracParams& params,
                                                    int max_degree,
                                                    int nodes_azimuth = 0,
                                                    int nodes_polar = 0);

  const FracParams& params() const { return params_; }
  int max_degree() const { return max_degree_; }
  int dim() const { return params_.dim; }

  int node_count() const { return int(nodes_.size()); }
  const Vec& node(int j) const { return nodes_[size_t(j)]; }
  double weight(int j) const { return weights_[size_t(j)]; }
  const std::vector<Vec>& nodes() const { return nodes_; }

  /// Total number of basis functions, sum of n_k for k <= L.
  int size() const { return size_; }
  int block_start(int k) const { return offsets_[size_t(k)]; }
  int block_size(int k) const;
  /// Degree of the basis function with global index idx.
  int degree_of(int idx) const;

  /// Y_idx(node j); the node-value table is precomputed.
  double value(int j, int idx) const { return vals_[size_t(j) * size_t(size_) + size_t(idx)]; }

  /// Values of the n_k degree-k functions at an arbitrary unit vector.
  std::vector<double> eval_degree(int k, const Vec& p) const;
  /// All basis values at an arbitrary unit vector (single recurrence pass).
  void eval_all(const Vec& p, std::vector<double>& out) const;
  /// Value of a coefficient expansion at an arbitrary unit vector.
  double eval(const std::vector<double>& coeffs, const Vec& p) const;

  /// Discrete L2 projection: coefficients of nodal data.
  std::vector<double> analyze(const std::vector<double>& nodal) const;
  /// Nodal values of a coefficient vector.
  std::vector<double> synthesize(const std::vector<double>& coeffs) const;

  /// Weighted node sum of nodal data (integral over the sphere).
  double integrate(const std::vector<double>& nodal) const;

 private:
  HarmonicBasis(const FracParams& params, int L) : params_(params), max_degree_(L) {}

  FracParams params_;
  int max_degree_;
  int size_ = 0;
  std::vector<int> offsets_;
  std::vector<Vec> nodes_;
  std::vector<double> weights_;
  std::vector<double> vals_;  // node-major [j * size_ + idx]
};

}  // namespace fracperim
