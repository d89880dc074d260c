#include <doctest.h>

#include <cmath>

#include "fracperim/domains.hpp"
#include "fracperim/specfun.hpp"

using namespace fracperim;

TEST_CASE("primitive membership") {
  Domain ball = Domain::make_ball(2, Vec(0.0, 0.0), 1.0);
  CHECK(ball.contains(Vec(0.0, 0.0)));
  CHECK(ball.contains(Vec(1.0, 0.0)));  // closed set
  CHECK(!ball.contains(Vec(2.0, 0.0)));

  Domain db = Domain::make_dumbbell(2, 1.0, 4.0, 0.1);
  CHECK(db.contains(Vec(0.0, 0.0)));
  CHECK(db.contains(Vec(2.0, 0.0)));   // neck interior
  CHECK(!db.contains(Vec(2.0, 0.5)));  // above the neck, outside lobes
  CHECK(db.contains(Vec(4.0, 0.0)));
  CHECK(!db.contains(Vec(5.5, 0.0)));
}

TEST_CASE("dilation: membership and bounding box scale") {
  Domain ball = Domain::make_ball(2, Vec(0.0, 0.0), 1.0);
  Domain big = ball.dilate(2.0);
  CHECK(big.contains(Vec(1.9, 0.0)));
  CHECK(!big.contains(Vec(2.1, 0.0)));
  Box bb = big.bounding_box();
  CHECK(bb.hi[0] == doctest::Approx(2.0));

  Domain box = Domain::make_box(Vec(0.0, 0.0), Vec(1.0, 1.0));
  Domain big_box = box.dilate(10.0);
  CHECK(big_box.contains(Vec(9.9, 9.9)));
  CHECK(!big_box.contains(Vec(10.1, 5.0)));

  // composition law on sampled points
  Domain d1 = ball.dilate(1.5).dilate(2.0);
  Domain d2 = ball.dilate(3.0);
  for (double x : {0.0, 1.0, 2.9, 3.1, 4.0})
    CHECK(d1.contains(Vec(x, 0.0)) == d2.contains(Vec(x, 0.0)));

  CHECK_THROWS_AS(ball.dilate(0.0), domain_error);
}

TEST_CASE("dumbbell construction guards and area") {
  CHECK_THROWS_AS(Domain::make_dumbbell(2, 1.0, 4.0, 1.5), domain_error);
  CHECK_THROWS_AS(Domain::make_dumbbell(2, 1.0, 1.5, 0.1), domain_error);

  double delta = 0.1, sep = 4.0;
  Domain db = Domain::make_dumbbell(2, 1.0, sep, delta);
  double analytic =
      2.0 * M_PI + (sep - 2.0 * std::sqrt(1.0 - delta * delta)) * 2.0 * delta;
  double counted = grid_count_volume(db, 0.01);
  CHECK(std::abs(counted - analytic) / analytic < 0.01);
}

TEST_CASE("grid-count volume converges at first order") {
  Domain ball = Domain::make_ball(2, Vec(0.2, -0.1), 1.0);
  double e1 = std::abs(grid_count_volume(ball, 0.04) - M_PI);
  double e2 = std::abs(grid_count_volume(ball, 0.02) - M_PI);
  CHECK(e2 < e1);
  CHECK(e2 < 0.02);
}

TEST_CASE("domain json round trip") {
  Domain db = Domain::make_dumbbell(2, 1.0, 4.0, 0.1).dilate(20.0);
  Domain back = Domain::from_json(db.to_json());
  CHECK(back.kind == DomainKind::dumbbell);
  CHECK(back.dilation == doctest::Approx(20.0));
  for (double x : {0.0, 20.0, 40.0, 81.0})
    CHECK(back.contains(Vec(x, 0.0)) == db.contains(Vec(x, 0.0)));

  Domain hs = Domain::make_halfspace(3, 2);
  Domain hs2 = Domain::from_json(hs.to_json());
  CHECK(hs2.contains(Vec(5.0, -3.0, 0.1)));
  CHECK(!hs2.contains(Vec(5.0, -3.0, -0.1)));

  CHECK_THROWS_AS(Domain::from_json("{\"schema\":\"nope\"}"), domain_error);
}

TEST_CASE("ray crossings for the dumbbell match membership flips") {
  Domain db = Domain::make_dumbbell(2, 1.0, 4.0, 0.1);
  // ray through the neck from inside the first lobe
  auto cr = db.ray_crossings(Vec(0.0, 0.0), Vec(0.0, 1.0), 10.0);
  REQUIRE(cr.size() == 1);
  CHECK(cr[0] == doctest::Approx(1.0).epsilon(1e-12));
  // vertical ray in the middle of the neck
  auto cr2 = db.ray_crossings(Vec(2.0, 0.0), Vec(0.0, 1.0), 10.0);
  REQUIRE(cr2.size() == 1);
  CHECK(cr2[0] == doctest::Approx(0.1).epsilon(1e-12));
  // horizontal ray down the axis crosses only the far cap
  auto cr3 = db.ray_crossings(Vec(0.0, 0.0), Vec(1.0, 0.0), 10.0);
  REQUIRE(cr3.size() == 1);
  CHECK(cr3[0] == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("star surface basics") {
  auto basis = HarmonicBasis::build(FracParams(2, 0.25), 6);
  StarSurface sphere = StarSurface::unit_sphere(Vec(0.0, 0.0), basis);
  CHECK(sphere.surface_point(Vec(1.0, 0.0))[0] == doctest::Approx(1.0));
  CHECK(sphere.enclosed_volume() == doctest::Approx(M_PI).epsilon(1e-12));

  // constant offset: radius 1+c ball
  std::vector<double> c(size_t(basis->size()), 0.0);
  double offset = 0.1;
  c[0] = offset * std::sqrt(2.0 * M_PI);
  StarSurface s(Vec(0.0, 0.0), basis, c);
  CHECK(s.radius(Vec(0.0, 1.0)) == doctest::Approx(1.1).epsilon(1e-13));
  CHECK(s.enclosed_volume() == doctest::Approx(M_PI * 1.1 * 1.1).epsilon(1e-12));

  // degree-1 deformation displaces opposite poles oppositely
  std::vector<double> c1(size_t(basis->size()), 0.0);
  c1[size_t(basis->block_start(1))] = 0.05;
  StarSurface s1(Vec(0.0, 0.0), basis, c1);
  double rp = s1.radius(Vec(1.0, 0.0)), rm = s1.radius(Vec(-1.0, 0.0));
  CHECK(rp - 1.0 == doctest::Approx(-(rm - 1.0)).epsilon(1e-12));

  // membership flips across the boundary
  Vec theta = Vec(std::cos(0.3), std::sin(0.3));
  Vec p = s1.surface_point(theta);
  CHECK(s1.contains(p * (1.0 - 1e-6)));
  CHECK(!s1.contains(p * (1.0 + 1e-6)));

  // admissibility guard
  std::vector<double> cbad(size_t(basis->size()), 0.0);
  cbad[0] = 0.6 * std::sqrt(2.0 * M_PI);
  CHECK_THROWS_AS(StarSurface(Vec(0.0, 0.0), basis, cbad), domain_error);
}

TEST_CASE("enclosed volume of a deformed ball matches a dense polar oracle") {
  auto basis = HarmonicBasis::build(FracParams(2, 0.25), 6);
  std::vector<double> c(size_t(basis->size()), 0.0);
  c[size_t(basis->block_start(2))] = 0.1;  // 0.1 * Y_2
  StarSurface s(Vec(0.0, 0.0), basis, c);
  // dense polar area: (1/2) int r(t)^2 dt
  int M = 200000;
  double acc = 0.0;
  for (int j = 0; j < M; ++j) {
    double t = 2.0 * M_PI * j / M;
    double r = s.radius(Vec(std::cos(t), std::sin(t)));
    acc += 0.5 * r * r * (2.0 * M_PI / M);
  }
  CHECK(std::abs(s.enclosed_volume() - acc) < 1e-8);
}

TEST_CASE("dilation law: volume scales like factor^N") {
  Domain ball = Domain::make_ball(2, Vec(0.0, 0.0), 1.0);
  double v1 = grid_count_volume(ball, 0.02);
  double v2 = grid_count_volume(ball.dilate(2.0), 0.04);
  CHECK(std::abs(v2 / v1 - 4.0) < 0.02);
}
