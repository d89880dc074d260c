#include <doctest.h>

#include <cmath>

#include "fracperim/potential.hpp"
#include "fracperim/specfun.hpp"

using namespace fracperim;

TEST_CASE("ball potential at the centre is N omega_N / (2s)") {
  FracParams p(2, 0.25);
  Domain ball = Domain::make_ball(2, Vec(0.0, 0.0), 1.0);
  double v = potential(ball, Vec(0.0, 0.0), p);
  CHECK(v == doctest::Approx(4.0 * M_PI).epsilon(1e-10));

  FracParams p3(3, 0.1);
  Domain b3 = Domain::make_ball(3, Vec(0.0, 0.0, 0.0), 1.0);
  double v3 = potential(b3, Vec(0.0, 0.0, 0.0), p3);
  CHECK(v3 == doctest::Approx(3.0 * unit_ball_volume(3) / 0.2).epsilon(1e-10));
}

TEST_CASE("ball potential is radial and increasing") {
  FracParams p(2, 0.25);
  Domain ball = Domain::make_ball(2, Vec(0.0, 0.0), 1.0);
  double prev = potential(ball, Vec(0.0, 0.0), p);
  for (double r : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    double va = potential(ball, Vec(r, 0.0), p);
    double vb = potential(ball, Vec(0.0, r), p);
    double vc = potential(ball, Vec(-r / std::sqrt(2.0), r / std::sqrt(2.0)), p);
    CHECK(std::abs(va - vb) < 1e-8 * va);
    CHECK(std::abs(va - vc) < 1e-8 * va);
    CHECK(va > prev);
    prev = va;
  }
  CHECK_THROWS_AS(potential(ball, Vec(1.5, 0.0), p), domain_error);
}

TEST_CASE("potential equivariance: translation, rotation, scaling") {
  FracParams p(2, 0.3);
  Domain ball = Domain::make_ball(2, Vec(0.0, 0.0), 1.0);
  Domain moved = Domain::make_ball(2, Vec(3.0, -2.0), 1.0);
  double a = potential(ball, Vec(0.3, 0.1), p);
  double b = potential(moved, Vec(3.3, -1.9), p);
  CHECK(a == doctest::Approx(b).epsilon(1e-10));

  // scaling: V_{lambda Omega}(lambda x) = lambda^{-2s} V_Omega(x)
  Domain big = ball.dilate(2.0);
  double c = potential(big, Vec(0.6, 0.2), p);
  CHECK(c == doctest::Approx(std::pow(2.0, -0.6) * a).epsilon(1e-9));

  // rotation via a rotated ellipse against the axis-aligned one (smooth
  // boundary keeps the angular trapezoid rule spectrally accurate)
  double ang = 0.5;
  auto in_ellipse = [](const Vec& x) {
    return x[0] * x[0] / 1.5 + x[1] * x[1] / 0.6 <= 1.0;
  };
  Domain ell = Domain::make_custom(2, in_ellipse, Box{Vec(-1.3, -0.8), Vec(1.3, 0.8)});
  auto rot = [ang](const Vec& x) {
    return Vec(std::cos(ang) * x[0] + std::sin(ang) * x[1],
               -std::sin(ang) * x[0] + std::cos(ang) * x[1]);
  };
  Domain rell = Domain::make_custom(
      2, [in_ellipse, rot](const Vec& x) { return in_ellipse(rot(x)); },
      Box{Vec(-1.4, -1.4), Vec(1.4, 1.4)});
  Vec y(0.2, 0.1);
  Vec ry(std::cos(ang) * y[0] - std::sin(ang) * y[1],
         std::sin(ang) * y[0] + std::cos(ang) * y[1]);
  double vb = potential(ell, y, p);
  double vr = potential(rell, ry, p);
  CHECK(vb == doctest::Approx(vr).epsilon(1e-8));
}

TEST_CASE("gradient and Hessian at the ball centre") {
  FracParams p(2, 0.25);
  Domain ball = Domain::make_ball(2, Vec(0.0, 0.0), 1.0);
  Vec g = potential_grad(ball, Vec(0.0, 0.0), p);
  CHECK(g.norm() < 1e-7);
  auto H = potential_hess(ball, Vec(0.0, 0.0), p);
  CHECK(H[0] > 0.0);
  CHECK(H[3] > 0.0);
  CHECK(std::abs(H[0] - H[3]) < 1e-6 * std::abs(H[0]));
  CHECK(std::abs(H[1]) < 1e-6 * std::abs(H[0]));
}

TEST_CASE("find_critical_points: ball has exactly one, at the origin") {
  FracParams p(2, 0.25);
  Domain ball = Domain::make_ball(2, Vec(0.0, 0.0), 1.0);
  CriticalSearchOptions opts;
  opts.multistart = 24;
  opts.seed = 3;
  auto pts = find_critical_points(ball, p, opts);
  REQUIRE(pts.size() == 1);
  CHECK(pts[0].location.norm() < 1e-5);
  CHECK(pts[0].classification == CriticalKind::minimum);
  CHECK(pts[0].value == doctest::Approx(4.0 * M_PI).epsilon(1e-8));
}

TEST_CASE("find_critical_points: box centre by symmetry") {
  FracParams p(2, 0.3);
  Domain box = Domain::make_box(Vec(0.0, 0.0), Vec(2.0, 1.0));
  CriticalSearchOptions opts;
  opts.multistart = 24;
  opts.seed = 11;
  auto pts = find_critical_points(box, p, opts);
  REQUIRE(!pts.empty());
  bool has_centre = false;
  for (const auto& r : pts)
    if ((r.location - Vec(1.0, 0.5)).norm() < 1e-4) has_centre = true;
  CHECK(has_centre);
}

TEST_CASE("dumbbell: two symmetric minima and a neck saddle") {
  FracParams p(2, 0.25);
  Domain db = Domain::make_dumbbell(2, 1.0, 4.0, 0.1);
  CriticalSearchOptions opts;
  opts.multistart = 96;
  opts.seed = 5;
  opts.boundary_floor = 0.015;
  // the thin neck needs fine angular resolution for smooth FD Hessians, and
  // the residual quadrature ripple sets the resolvable point separation
  opts.spec.dirs_2d = 4096;
  opts.merge_radius = 5e-3;
  auto pts = find_critical_points(db, p, opts);
  REQUIRE(pts.size() >= 3);
  int mins = 0, saddles = 0;
  bool neck_saddle = false;
  for (const auto& r : pts) {
    if (r.classification == CriticalKind::minimum) ++mins;
    if (r.classification == CriticalKind::saddle) {
      ++saddles;
      if (std::abs(r.location[0] - 2.0) < 5e-3 && std::abs(r.location[1]) < 5e-3)
        neck_saddle = true;
    }
  }
  CHECK(mins >= 2);
  CHECK(saddles >= 1);
  CHECK(neck_saddle);
  // mirror symmetry about the neck plane, within the merge radius
  for (const auto& r : pts) {
    Vec mirrored(4.0 - r.location[0], r.location[1]);
    bool found = false;
    for (const auto& q : pts)
      if ((q.location - mirrored).norm() < 2.0 * opts.merge_radius) found = true;
    CHECK(found);
  }
}

TEST_CASE("dumbbell potential approaches the ball potential in the lobe") {
  FracParams p(2, 0.25);
  Domain ball = Domain::make_ball(2, Vec(0.0, 0.0), 1.0);
  double vb = potential(ball, Vec(0.1, 0.1), p);
  double narrow = potential(Domain::make_dumbbell(2, 1.0, 4.0, 0.02), Vec(0.1, 0.1), p);
  double wide = potential(Domain::make_dumbbell(2, 1.0, 4.0, 0.3), Vec(0.1, 0.1), p);
  CHECK(std::abs(narrow - vb) < std::abs(wide - vb));
  CHECK(std::abs(narrow - vb) / vb < 0.02);
}

TEST_CASE("boundary blow-up: rate -2s, monotone divergence") {
  FracParams p(2, 0.25);
  Domain ball = Domain::make_ball(2, Vec(0.0, 0.0), 1.0);
  std::vector<double> ds;
  for (int i = 0; i < 10; ++i) ds.push_back(3e-4 * std::pow(10.0, 1.5 * i / 9.0));
  PotentialSpec spec;
  spec.dirs_2d = 8192;  // the kernel peak at distance d has angular width ~ sqrt(d)
  auto fit = boundary_blowup_fit(ball, Vec(1.0, 0.0), p, ds, spec);
  CHECK(fit.monotone_increasing);
  CHECK(std::abs(fit.fitted_exponent + 2.0 * p.s) < 0.05);
  // slope independent of the boundary point
  auto fit2 = boundary_blowup_fit(ball, Vec(0.0, -1.0), p, ds, spec);
  CHECK(std::abs(fit.fitted_exponent - fit2.fitted_exponent) < 0.02);
}
