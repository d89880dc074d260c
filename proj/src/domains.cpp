#include "fracperim/domains.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

namespace fracperim {

using nlohmann::json;

std::string to_string(DomainKind k) {
  switch (k) {
    case DomainKind::ball: return "ball";
    case DomainKind::box: return "box";
    case DomainKind::halfspace: return "halfspace";
    case DomainKind::halfball: return "halfball";
    case DomainKind::dumbbell: return "dumbbell";
    case DomainKind::custom: return "custom";
  }
  return "?";
}

DomainKind domain_kind_from_string(const std::string& s) {
  if (s == "ball") return DomainKind::ball;
  if (s == "box") return DomainKind::box;
  if (s == "halfspace") return DomainKind::halfspace;
  if (s == "halfball") return DomainKind::halfball;
  if (s == "dumbbell") return DomainKind::dumbbell;
  if (s == "custom") return DomainKind::custom;
  throw domain_error("unknown domain kind: " + s);
}

Domain Domain::make_ball(int dim, Vec center, double radius) {
  if (radius <= 0.0) throw domain_error("ball: radius must be positive");
  Domain d;
  d.kind = DomainKind::ball;
  d.dim = dim;
  center.dim = dim;
  d.center = center;
  d.radius = radius;
  return d;
}

Domain Domain::make_box(Vec lo, Vec hi) {
  Domain d;
  d.kind = DomainKind::box;
  d.dim = lo.dim;
  for (int i = 0; i < d.dim; ++i)
    if (!(lo[i] < hi[i])) throw domain_error("box: lo must be < hi");
  d.box_lo = lo;
  d.box_hi = hi;
  return d;
}

Domain Domain::make_halfspace(int dim, int normal_axis) {
  if (normal_axis < 0 || normal_axis >= dim)
    throw domain_error("halfspace: bad normal axis");
  Domain d;
  d.kind = DomainKind::halfspace;
  d.dim = dim;
  d.normal_axis = normal_axis;
  return d;
}

Domain Domain::make_halfball(int dim, double radius) {
  if (radius <= 0.0) throw domain_error("halfball: radius must be positive");
  Domain d;
  d.kind = DomainKind::halfball;
  d.dim = dim;
  d.radius = radius;
  return d;
}

Domain Domain::make_dumbbell(int dim, double lobe_radius, double separation,
                             double neck_halfwidth) {
  if (!(neck_halfwidth > 0.0 && neck_halfwidth < lobe_radius))
    throw domain_error("dumbbell: need 0 < neck_halfwidth < lobe_radius");
  if (!(separation > 2.0 * lobe_radius))
    throw domain_error("dumbbell: need separation > 2 * lobe_radius");
  Domain d;
  d.kind = DomainKind::dumbbell;
  d.dim = dim;
  d.lobe_radius = lobe_radius;
  d.separation = separation;
  d.neck_halfwidth = neck_halfwidth;
  return d;
}

Domain Domain::make_custom(int dim, std::function<bool(const Vec&)> oracle,
                           Box bounding_box) {
  Domain d;
  d.kind = DomainKind::custom;
  d.dim = dim;
  d.oracle = std::move(oracle);
  d.box_lo = bounding_box.lo;
  d.box_hi = bounding_box.hi;
  return d;
}

namespace {

bool base_contains(const Domain& d, const Vec& x) {
  switch (d.kind) {
    case DomainKind::ball:
      return (x - d.center).norm2() <= d.radius * d.radius;
    case DomainKind::box:
      for (int i = 0; i < d.dim; ++i)
        if (x[i] < d.box_lo[i] || x[i] > d.box_hi[i]) return false;
      return true;
    case DomainKind::halfspace:
      return x[d.normal_axis] >= 0.0;
    case DomainKind::halfball:
      return x[d.dim - 1] >= 0.0 && x.norm2() <= d.radius * d.radius;
    case DomainKind::dumbbell: {
      double r2 = d.lobe_radius * d.lobe_radius;
      if (x.norm2() <= r2) return true;
      Vec c2 = Vec::zero(d.dim);
      c2[0] = d.separation;
      if ((x - c2).norm2() <= r2) return true;
      if (x[0] < 0.0 || x[0] > d.separation) return false;
      double perp2 = 0.0;
      for (int i = 1; i < d.dim; ++i) perp2 += x[i] * x[i];
      return perp2 <= d.neck_halfwidth * d.neck_halfwidth;
    }
    case DomainKind::custom:
      return d.oracle(x);
  }
  return false;
}

}  // namespace

bool Domain::contains(const Vec& x) const {
  if (dilation == 1.0) return base_contains(*this, x);
  return base_contains(*this, x / dilation);
}

Domain Domain::dilate(double factor) const {
  if (!(factor > 0.0)) throw domain_error("dilate: factor must be positive");
  Domain d = *this;
  d.dilation *= factor;
  return d;
}

Box Domain::base_bbox() const {
  Box b;
  b.lo = Vec::zero(dim);
  b.hi = Vec::zero(dim);
  switch (kind) {
    case DomainKind::ball:
      for (int i = 0; i < dim; ++i) {
        b.lo[i] = center[i] - radius;
        b.hi[i] = center[i] + radius;
      }
      break;
    case DomainKind::box:
    case DomainKind::custom:
      b.lo = box_lo;
      b.hi = box_hi;
      break;
    case DomainKind::halfspace:
      throw domain_error("bounding_box: halfspace is unbounded");
    case DomainKind::halfball:
      for (int i = 0; i < dim; ++i) {
        b.lo[i] = -radius;
        b.hi[i] = radius;
      }
      b.lo[dim - 1] = 0.0;
      break;
    case DomainKind::dumbbell:
      for (int i = 0; i < dim; ++i) {
        b.lo[i] = -lobe_radius;
        b.hi[i] = lobe_radius;
      }
      b.hi[0] = separation + lobe_radius;
      break;
  }
  return b;
}

Box Domain::bounding_box() const {
  Box b = base_bbox();
  return b.scaled(dilation);
}

namespace {

// Crossings of a ray with a sphere |p - c| = r, pushed into out.
void sphere_ray(const Vec& x, const Vec& dir, const Vec& c, double r, double t_max,
                std::vector<double>& out) {
  Vec q = x - c;
  double b = q.dot(dir);
  double disc = b * b - (q.norm2() - r * r);
  if (disc <= 0.0) return;
  double sq = std::sqrt(disc);
  for (double t : {-b - sq, -b + sq})
    if (t > 1e-14 && t <= t_max) out.push_back(t);
}

// Crossings with the slab planes of a box.
void box_ray(const Vec& x, const Vec& dir, const Vec& lo, const Vec& hi, int dim,
             double t_max, std::vector<double>& out) {
  for (int i = 0; i < dim; ++i) {
    if (dir[i] == 0.0) continue;
    for (double plane : {lo[i], hi[i]}) {
      double t = (plane - x[i]) / dir[i];
      if (t > 1e-14 && t <= t_max) out.push_back(t);
    }
  }
}

}  // namespace

std::vector<double> Domain::ray_crossings(const Vec& x, const Vec& dir,
                                          double t_max) const {
  // Work in base coordinates; crossing parameters are invariant under the
  // uniform scaling x -> x/dilation when dir stays unit (t scales).
  Vec xb = x / dilation;
  double tb_max = t_max / dilation;
  std::vector<double> cand;
  switch (kind) {
    case DomainKind::ball:
      sphere_ray(xb, dir, center, radius, tb_max, cand);
      break;
    case DomainKind::box:
      box_ray(xb, dir, box_lo, box_hi, dim, tb_max, cand);
      break;
    case DomainKind::halfspace: {
      if (dir[normal_axis] != 0.0) {
        double t = -xb[normal_axis] / dir[normal_axis];
        if (t > 1e-14 && t <= tb_max) cand.push_back(t);
      }
      break;
    }
    case DomainKind::halfball: {
      sphere_ray(xb, dir, Vec::zero(dim), radius, tb_max, cand);
      if (dir[dim - 1] != 0.0) {
        double t = -xb[dim - 1] / dir[dim - 1];
        if (t > 1e-14 && t <= tb_max) cand.push_back(t);
      }
      break;
    }
    case DomainKind::dumbbell: {
      sphere_ray(xb, dir, Vec::zero(dim), lobe_radius, tb_max, cand);
      Vec c2 = Vec::zero(dim);
      c2[0] = separation;
      sphere_ray(xb, dir, c2, lobe_radius, tb_max, cand);
      Vec slo = Vec::zero(dim), shi = Vec::zero(dim);
      slo[0] = 0.0;
      shi[0] = separation;
      for (int i = 1; i < dim; ++i) {
        slo[i] = -neck_halfwidth;
        shi[i] = neck_halfwidth;
      }
      box_ray(xb, dir, slo, shi, dim, tb_max, cand);
      break;
    }
    case DomainKind::custom: {
      // Scan and bisect sign changes of the oracle along the ray.
      Box bb = base_bbox();
      double step = 0.0;
      for (int i = 0; i < dim; ++i) step = std::max(step, bb.side(i));
      step = std::max(1e-9, step / 512.0);
      bool prev = base_contains(*this, xb);
      for (double t = step; t <= tb_max + step; t += step) {
        bool cur = base_contains(*this, xb + dir * t);
        if (cur != prev) {
          double a = t - step, b = t;
          for (int it = 0; it < 60; ++it) {
            double m = 0.5 * (a + b);
            if (base_contains(*this, xb + dir * m) == prev)
              a = m;
            else
              b = m;
          }
          cand.push_back(0.5 * (a + b));
          prev = cur;
        }
      }
      break;
    }
  }
  std::sort(cand.begin(), cand.end());
  // Keep genuine membership flips only (union primitives produce interior hits).
  std::vector<double> out;
  bool inside = base_contains(*this, xb);
  double prev_t = 0.0;
  for (size_t i = 0; i < cand.size(); ++i) {
    double t = cand[i];
    double t_next = (i + 1 < cand.size()) ? cand[i + 1] : std::min(tb_max, t + 1.0);
    double mid = 0.5 * (t + t_next);
    bool now = base_contains(*this, xb + dir * mid);
    if (now != inside && t > prev_t + 1e-14) {
      out.push_back(t * dilation);
      inside = now;
      prev_t = t;
    }
  }
  return out;
}

Vec Domain::boundary_normal(const Vec& x) const {
  Vec xb = x / dilation;
  const double tol = 1e-6;
  switch (kind) {
    case DomainKind::ball:
      return (xb - center).normalized();
    case DomainKind::halfball: {
      if (std::abs(xb[dim - 1]) < tol * radius) {
        Vec n = Vec::zero(dim);
        n[dim - 1] = -1.0;
        return n;
      }
      return xb.normalized();
    }
    case DomainKind::halfspace: {
      Vec n = Vec::zero(dim);
      n[normal_axis] = -1.0;
      return n;
    }
    case DomainKind::box: {
      // nearest face
      double best = 1e300;
      Vec n = Vec::zero(dim);
      for (int i = 0; i < dim; ++i) {
        if (std::abs(xb[i] - box_lo[i]) < best) {
          best = std::abs(xb[i] - box_lo[i]);
          n = Vec::zero(dim);
          n[i] = -1.0;
        }
        if (std::abs(box_hi[i] - xb[i]) < best) {
          best = std::abs(box_hi[i] - xb[i]);
          n = Vec::zero(dim);
          n[i] = 1.0;
        }
      }
      return n;
    }
    case DomainKind::dumbbell: {
      double tolr = tol * lobe_radius;
      Vec c2 = Vec::zero(dim);
      c2[0] = separation;
      bool in_slab_shadow = xb[0] >= -tolr && xb[0] <= separation + tolr;
      double perp2 = 0.0;
      for (int i = 1; i < dim; ++i) perp2 += xb[i] * xb[i];
      if (std::abs(xb.norm() - lobe_radius) < tolr) return xb.normalized();
      if (std::abs((xb - c2).norm() - lobe_radius) < tolr)
        return (xb - c2).normalized();
      if (in_slab_shadow && std::abs(std::sqrt(perp2) - neck_halfwidth) < tolr) {
        Vec n = Vec::zero(dim);
        for (int i = 1; i < dim; ++i) n[i] = xb[i];
        return n.normalized();
      }
      break;
    }
    case DomainKind::custom:
      break;
  }
  throw domain_error("boundary_normal: not resolvable for this domain kind");
}

std::string Domain::to_json() const {
  if (kind == DomainKind::custom)
    throw domain_error("to_json: custom domains are not serializable");
  json j;
  j["schema"] = "fracperim/domain-v1";
  j["kind"] = to_string(kind);
  j["dim"] = dim;
  j["dilation"] = dilation;
  switch (kind) {
    case DomainKind::ball:
      j["center"] = std::vector<double>(center.v.begin(), center.v.begin() + dim);
      j["radius"] = radius;
      break;
    case DomainKind::box:
      j["lo"] = std::vector<double>(box_lo.v.begin(), box_lo.v.begin() + dim);
      j["hi"] = std::vector<double>(box_hi.v.begin(), box_hi.v.begin() + dim);
      break;
    case DomainKind::halfspace:
      j["normal_axis"] = normal_axis;
      break;
    case DomainKind::halfball:
      j["radius"] = radius;
      break;
    case DomainKind::dumbbell:
      j["lobe_radius"] = lobe_radius;
      j["separation"] = separation;
      j["neck_halfwidth"] = neck_halfwidth;
      break;
    default:
      break;
  }
  return j.dump(2);
}

Domain Domain::from_json(const std::string& text) {
  json j = json::parse(text);
  if (j.value("schema", "") != "fracperim/domain-v1")
    throw domain_error("domain json: missing or wrong schema field");
  int dim = j.at("dim").get<int>();
  if (dim < 2 || dim > 3) throw domain_error("domain json: dim must be 2 or 3");
  DomainKind kind = domain_kind_from_string(j.at("kind").get<std::string>());
  auto vec_of = [&](const char* key) {
    auto a = j.at(key).get<std::vector<double>>();
    if (int(a.size()) != dim) throw domain_error("domain json: bad vector length");
    Vec p = Vec::zero(dim);
    for (int i = 0; i < dim; ++i) p[i] = a[size_t(i)];
    return p;
  };
  Domain d;
  switch (kind) {
    case DomainKind::ball:
      d = make_ball(dim, vec_of("center"), j.at("radius").get<double>());
      break;
    case DomainKind::box:
      d = make_box(vec_of("lo"), vec_of("hi"));
      break;
    case DomainKind::halfspace:
      d = make_halfspace(dim, j.at("normal_axis").get<int>());
      break;
    case DomainKind::halfball:
      d = make_halfball(dim, j.at("radius").get<double>());
      break;
    case DomainKind::dumbbell:
      d = make_dumbbell(dim, j.at("lobe_radius").get<double>(),
                        j.at("separation").get<double>(),
                        j.at("neck_halfwidth").get<double>());
      break;
    case DomainKind::custom:
      throw domain_error("domain json: custom domains are not serializable");
  }
  double dil = j.value("dilation", 1.0);
  if (dil != 1.0) d = d.dilate(dil);
  return d;
}

StarSurface::StarSurface(Vec center, std::shared_ptr<const HarmonicBasis> basis,
                         std::vector<double> coeffs)
    : center_(center), basis_(std::move(basis)), coeffs_(std::move(coeffs)) {
  if (int(coeffs_.size()) != basis_->size())
    throw domain_error("StarSurface: coefficient count does not match basis");
  center_.dim = basis_->dim();
  std::vector<double> w = basis_->synthesize(coeffs_);
  radii_.resize(w.size());
  w_sup_ = 0.0;
  r_max_ = 0.0;
  r_min_ = 1e300;
  for (size_t j = 0; j < w.size(); ++j) {
    w_sup_ = std::max(w_sup_, std::abs(w[j]));
    radii_[j] = 1.0 + w[j];
    r_max_ = std::max(r_max_, radii_[j]);
    r_min_ = std::min(r_min_, radii_[j]);
  }
  if (w_sup_ >= 0.5)
    throw domain_error("StarSurface: sup |w| must be < 1/2 (got " +
                       std::to_string(w_sup_) + ")");
  if (r_min_ <= 0.0) throw domain_error("StarSurface: degenerate surface, radius <= 0");
}

StarSurface StarSurface::unit_sphere(Vec center,
                                     std::shared_ptr<const HarmonicBasis> basis) {
  return StarSurface(center, basis, std::vector<double>(size_t(basis->size()), 0.0));
}

double StarSurface::radius(const Vec& theta) const {
  return 1.0 + basis_->eval(coeffs_, theta);
}

Vec StarSurface::surface_point(const Vec& theta) const {
  double r = radius(theta);
  if (r <= 0.0) throw numeric_error("surface_point: degenerate surface");
  return center_ + theta * r;
}

double StarSurface::enclosed_volume() const {
  const int N = basis_->dim();
  double s = 0.0;
  for (int j = 0; j < basis_->node_count(); ++j)
    s += basis_->weight(j) * std::pow(radii_[size_t(j)], N);
  return s / N;
}

bool StarSurface::contains(const Vec& x) const {
  Vec q = x - center_;
  double r = q.norm();
  if (r < 1e-14) return true;
  return r <= radius(q / r);
}

double grid_count_volume(const Domain& d, double h) {
  Box bb = d.bounding_box().padded(2 * h);
  int dim = d.dim;
  std::array<int, 3> n{1, 1, 1};
  for (int i = 0; i < dim; ++i)
    n[size_t(i)] = std::max(1, int(std::ceil(bb.side(i) / h)));
  const int sub = 4;
  double cell = 1.0;
  for (int i = 0; i < dim; ++i) cell *= bb.side(i) / n[size_t(i)];
  double total = 0.0;
  std::array<int, 3> idx{0, 0, 0};
  int64_t cells = 1;
  for (int i = 0; i < dim; ++i) cells *= n[size_t(i)];
  for (int64_t c = 0; c < cells; ++c) {
    int64_t rem = c;
    for (int i = 0; i < dim; ++i) {
      idx[size_t(i)] = int(rem % n[size_t(i)]);
      rem /= n[size_t(i)];
    }
    int hits = 0, tot = 0;
    std::array<int, 3> sidx{0, 0, 0};
    int64_t subcells = 1;
    for (int i = 0; i < dim; ++i) subcells *= sub;
    for (int64_t sc = 0; sc < subcells; ++sc) {
      int64_t srem = sc;
      Vec p = Vec::zero(dim);
      for (int i = 0; i < dim; ++i) {
        sidx[size_t(i)] = int(srem % sub);
        srem /= sub;
        double fi = (idx[size_t(i)] + (sidx[size_t(i)] + 0.5) / sub);
        p[i] = bb.lo[i] + fi * bb.side(i) / n[size_t(i)];
      }
      ++tot;
      if (d.contains(p)) ++hits;
    }
    total += cell * hits / tot;
  }
  return total;
}

}  // namespace fracperim
