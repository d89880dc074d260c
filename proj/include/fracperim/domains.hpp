#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fracperim/core.hpp"
#include "fracperim/harmonics.hpp"

namespace fracperim {

enum class DomainKind { ball, box, halfspace, halfball, dumbbell, custom };

std::string to_string(DomainKind k);
DomainKind domain_kind_from_string(const std::string& s);

/// Membership-oracle set. Closed convention: boundary points count as inside.
/// `dilation` scales the base shape by x -> x / dilation membership, so
/// dilate(Omega, 1/eps) realizes Omega_eps = (1/eps) Omega.
struct Domain {
  DomainKind kind = DomainKind::ball;
  int dim = 2;

  // ball / halfball
  Vec center;
  double radius = 1.0;
  // box
  Vec box_lo, box_hi;
  // halfspace { x[axis] >= 0 }
  int normal_axis = 1;
  // dumbbell: lobes of radius `lobe_radius` centred at 0 and separation*e1,
  // joined by the slab { 0 <= x1 <= separation, |x_perp| <= neck_halfwidth }
  double lobe_radius = 1.0, separation = 4.0, neck_halfwidth = 0.1;
  // custom oracle in base (undilated) coordinates, with its bounding box
  std::function<bool(const Vec&)> oracle;

  double dilation = 1.0;

  static Domain make_ball(int dim, Vec center, double radius);
  static Domain make_box(Vec lo, Vec hi);
  static Domain make_halfspace(int dim, int normal_axis);
  static Domain make_halfball(int dim, double radius);
  static Domain make_dumbbell(int dim, double lobe_radius, double separation,
                              double neck_halfwidth);
  static Domain make_custom(int dim, std::function<bool(const Vec&)> oracle,
                            Box bounding_box);

  bool contains(const Vec& x) const;
  Domain dilate(double factor) const;

  bool bounded() const { return kind != DomainKind::halfspace; }
  /// Bounding box in physical (dilated) coordinates.
  Box bounding_box() const;

  /// All boundary crossings t in (0, t_max] of the ray x + t*dir, ascending.
  /// Analytic for the primitive kinds, scan + bisection for custom oracles.
  std::vector<double> ray_crossings(const Vec& x, const Vec& dir, double t_max) const;

  /// Outward unit normal at a boundary point (primitive kinds only).
  Vec boundary_normal(const Vec& x) const;

  std::string to_json() const;
  static Domain from_json(const std::string& text);

 private:
  Box base_bbox() const;
};

/// Star-shaped deformed ball B(xi, w): boundary xi + (1 + w(t)) t for unit
/// vectors t, with w given by harmonic coefficients on a basis.
class StarSurface {
 public:
  StarSurface(Vec center, std::shared_ptr<const HarmonicBasis> basis,
              std::vector<double> coeffs);

  /// The round unit sphere centred at xi (w = 0).
  static StarSurface unit_sphere(Vec center, std::shared_ptr<const HarmonicBasis> basis);

  const Vec& center() const { return center_; }
  const HarmonicBasis& basis() const { return *basis_; }
  std::shared_ptr<const HarmonicBasis> basis_ptr() const { return basis_; }
  const std::vector<double>& coeffs() const { return coeffs_; }

  /// 1 + w at an arbitrary unit direction / at a basis node.
  double radius(const Vec& theta) const;
  double radius_node(int j) const { return radii_[size_t(j)]; }
  const std::vector<double>& node_radii() const { return radii_; }

  double w_sup_norm() const { return w_sup_; }

  /// Boundary point xi + (1 + w(theta)) theta.
  Vec surface_point(const Vec& theta) const;

  /// (1/N) * sum_j weight_j * radius_j^N  -- exact for w == const.
  double enclosed_volume() const;

  /// True iff |x - xi| <= 1 + w((x - xi)/|x - xi|); the centre is inside.
  bool contains(const Vec& x) const;

  /// Largest node radius (used for far-field cutoffs).
  double max_radius() const { return r_max_; }
  double min_radius() const { return r_min_; }

 private:
  Vec center_;
  std::shared_ptr<const HarmonicBasis> basis_;
  std::vector<double> coeffs_;
  std::vector<double> radii_;
  double w_sup_ = 0.0, r_max_ = 1.0, r_min_ = 1.0;
};

/// Monte-Carlo-free volume check: counts subcell-sampled grid occupancy.
/// Test utility, O(h) accurate for perimeter-bounded sets.
double grid_count_volume(const Domain& d, double h);

}  // namespace fracperim
