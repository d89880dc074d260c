#include <doctest.h>

#include <cmath>

#include "fracperim/curvature.hpp"
#include "fracperim/specfun.hpp"

using namespace fracperim;

TEST_CASE("gamma function known values") {
  CHECK(gamma_fn(1.0) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(gamma_fn(5.0) == doctest::Approx(24.0).epsilon(1e-13));
  CHECK(gamma_fn(0.5) == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-12));
  CHECK_THROWS_AS(gamma_fn(0.0), domain_error);
  CHECK_THROWS_AS(gamma_fn(-1.5), domain_error);
}

TEST_CASE("gamma reflection for negative non-integers") {
  // Gamma(-0.5) = -2 sqrt(pi)
  CHECK(gamma_reflected(-0.5) == doctest::Approx(-2.0 * std::sqrt(M_PI)).epsilon(1e-12));
  CHECK_THROWS_AS(gamma_reflected(-1.0), domain_error);
}

TEST_CASE("unit ball volumes") {
  CHECK(unit_ball_volume(1) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(unit_ball_volume(2) == doctest::Approx(M_PI).epsilon(1e-14));
  CHECK(unit_ball_volume(3) == doctest::Approx(4.0 * M_PI / 3.0).epsilon(1e-14));
}

TEST_CASE("harmonic space dimensions") {
  CHECK(harmonic_dim(2, 0) == 1);
  CHECK(harmonic_dim(2, 1) == 2);
  CHECK(harmonic_dim(2, 5) == 2);
  CHECK(harmonic_dim(3, 0) == 1);
  CHECK(harmonic_dim(3, 1) == 3);
  // N_2 - N_0 = 10 - 1 from the binomial count with n = N = 3
  CHECK(harmonic_dim(3, 2) == 5);
  CHECK(harmonic_dim(3, 4) == 9);
}

TEST_CASE("d_const values and positivity") {
  CHECK(d_const(FracParams(2, 0.25)) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(d_const(FracParams(3, 0.25)) == doctest::Approx(0.5 / (2.0 * M_PI)).epsilon(1e-14));
  for (double s : {0.05, 0.2, 0.35, 0.49})
    for (int N : {2, 3}) CHECK(d_const(FracParams(N, s)) > 0.0);
  // s -> 1/2 limit vanishes
  CHECK(d_const(FracParams(2, 0.4999)) < 3e-4);
}

TEST_CASE("FracParams validation") {
  CHECK_THROWS_AS(FracParams(2, 0.5), domain_error);
  CHECK_THROWS_AS(FracParams(2, 0.0), domain_error);
  CHECK_THROWS_AS(FracParams(2, 0.7), domain_error);
  CHECK_THROWS_AS(FracParams(4, 0.25), domain_error);
}

TEST_CASE("eigenvalues: lambda_0 = 0 and strict growth") {
  for (int N : {2, 3}) {
    for (double s : {0.1, 0.25, 0.4}) {
      FracParams p(N, s);
      CHECK(eigenvalue(p, 0) == 0.0);
      for (int k = 0; k <= 8; ++k) CHECK(eigenvalue(p, k) < eigenvalue(p, k + 1));
    }
  }
}

TEST_CASE("eigenvalue closed forms") {
  // lambda_1(N=3) = 2^{1-2s} pi / (1-2s)
  for (double s : {0.1, 0.25, 0.4}) {
    FracParams p(3, s);
    double expect = std::pow(2.0, 1.0 - 2.0 * s) * M_PI / (1.0 - 2.0 * s);
    CHECK(eigenvalue(p, 1) == doctest::Approx(expect).epsilon(1e-12));
  }
  // lambda_1(N=2) = sqrt(pi) Gamma((1-2s)/2) / (2^{2s} Gamma(1-s))
  for (double s : {0.1, 0.25, 0.4}) {
    FracParams p(2, s);
    double expect = std::sqrt(M_PI) * std::tgamma(0.5 * (1.0 - 2.0 * s)) /
                    (std::pow(2.0, 2.0 * s) * std::tgamma(1.0 - s));
    CHECK(eigenvalue(p, 1) == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("eigenvalue formula agrees with the PV quadrature oracle") {
  // The Funk-Hecke reduction of the PV integral is the ground truth for the
  // printed Gamma-ratio formula (which has a typo'd prefactor in the source).
  for (int N : {2, 3}) {
    for (double s : {0.1, 0.25, 0.4}) {
      FracParams p(N, s);
      for (int k = 1; k <= 4; ++k) {
        double lf = eigenvalue(p, k);
        double lq = ls_eigenvalue_quadrature(p, k);
        CHECK(std::abs(lf - lq) / lq < 1e-8);
      }
    }
  }
}

TEST_CASE("sphere curvature constant equals lambda_1 / s and the shell oracle") {
  for (int N : {2, 3}) {
    for (double s : {0.1, 0.25, 0.4}) {
      FracParams p(N, s);
      double c_formula = sphere_curvature_const(p);
      double c_oracle = sphere_curvature_oracle(p);
      CHECK(std::abs(c_formula - c_oracle) / c_oracle < 1e-9);
    }
  }
  // frozen value, N=2, s=1/4: sqrt(pi) Gamma(1/4) / (2^{1/2} Gamma(3/4)) / s
  FracParams p(2, 0.25);
  CHECK(sphere_curvature_const(p) == doctest::Approx(14.832597418410975).epsilon(1e-12));
}
