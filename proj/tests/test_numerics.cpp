#include "contmem/numerics.hpp"

#include "doctest.h"

#include <cmath>

using namespace contmem;
using namespace contmem::numerics;

TEST_CASE("uniform_grid matches the trapezoid definition") {
  const QuadratureGrid grid = uniform_grid(0.0, 0.75, 4);
  REQUIRE(grid.size() == 4);
  CHECK(grid.points(0) == 0.0);
  CHECK(grid.points(1) == doctest::Approx(0.25));
  CHECK(grid.points(2) == doctest::Approx(0.5));
  CHECK(grid.points(3) == 0.75);
  CHECK(grid.weights(0) == doctest::Approx(0.125));
  CHECK(grid.weights(1) == doctest::Approx(0.25));
  CHECK(grid.weights(2) == doctest::Approx(0.25));
  CHECK(grid.weights(3) == doctest::Approx(0.125));
}

TEST_CASE("uniform_grid minimal and default sizes") {
  const QuadratureGrid two = uniform_grid(0.0, 1.0, 2);
  CHECK(two.points(0) == 0.0);
  CHECK(two.points(1) == 1.0);
  CHECK(two.weights(0) == 0.5);
  CHECK(two.weights(1) == 0.5);

  const QuadratureGrid paper = uniform_grid(0.0, 1.0, 1000);
  CHECK(paper.size() == 1000);
  CHECK(paper.points(1) - paper.points(0) == doctest::Approx(1.0 / 999));
  // weights sum to b - a
  CHECK(paper.weights.sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("uniform_grid rejects bad arguments") {
  CHECK_THROWS_AS(uniform_grid(0.0, 1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(uniform_grid(1.0, 0.0, 10), std::invalid_argument);
  CHECK_THROWS_AS(uniform_grid(0.0, 0.0, 10), std::invalid_argument);
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(uniform_grid(0.0, inf, 10), std::invalid_argument);
}

TEST_CASE("integrate is exact for affine integrands") {
  for (int count : {2, 3, 17, 1000}) {
    const QuadratureGrid grid = uniform_grid(-1.0, 2.5, count);
    Vector values(count);
    for (int k = 0; k < count; ++k) {
      values(k) = 3.0 * grid.points(k) - 0.7;
    }
    // analytic: 3/2 (b^2 - a^2) - 0.7 (b - a)
    const double expected = 1.5 * (2.5 * 2.5 - 1.0) - 0.7 * 3.5;
    CHECK(integrate(values, grid) ==
          doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("integrate handles constants and ramps on [0,1]") {
  const QuadratureGrid grid = uniform_grid(0.0, 1.0, 1000);
  CHECK(integrate(Vector::Ones(1000), grid) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(integrate(grid.points, grid) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("integrate exp(t) against a fine-grid oracle") {
  const QuadratureGrid grid = uniform_grid(0.0, 1.0, 1000);
  const QuadratureGrid fine = uniform_grid(0.0, 1.0, 100001);
  const Vector coarse_values = grid.points.array().exp().matrix();
  const Vector fine_values = fine.points.array().exp().matrix();
  const double oracle = integrate(fine_values, fine);
  CHECK(oracle == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-9));
  CHECK(integrate(coarse_values, grid) == doctest::Approx(oracle).epsilon(1e-6));
}

TEST_CASE("integrate converges at second order on exp(t)") {
  const double truth = std::exp(1.0) - 1.0;
  auto error_at = [&](int count) {
    const QuadratureGrid grid = uniform_grid(0.0, 1.0, count);
    return std::abs(integrate(grid.points.array().exp().matrix(), grid) -
                    truth);
  };
  // halving the step: count - 1 segments -> 2(count - 1)
  CHECK(error_at(51) / error_at(101) >= 3.5);
  CHECK(error_at(101) / error_at(201) >= 3.5);
}

TEST_CASE("integrate validates inputs") {
  const QuadratureGrid grid = uniform_grid(0.0, 1.0, 8);
  CHECK_THROWS_AS(integrate(Vector::Ones(7), grid), std::invalid_argument);
  Vector bad = Vector::Ones(8);
  bad(3) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(integrate(bad, grid), std::invalid_argument);
}

TEST_CASE("normalized_exp of constant scores is the uniform density") {
  const QuadratureGrid grid = uniform_grid(0.0, 1.0, 257);
  const Vector density = normalized_exp(Vector::Constant(257, 4.2), grid);
  for (int k = 0; k < 257; ++k) {
    CHECK(density(k) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("normalized_exp is invariant to score shifts") {
  const QuadratureGrid grid = uniform_grid(0.0, 1.0, 400);
  Vector scores(400);
  for (int k = 0; k < 400; ++k) {
    scores(k) = std::sin(7.0 * grid.points(k));
  }
  const Vector base = normalized_exp(scores, grid);
  const Vector shifted =
      normalized_exp((scores.array() + 1000.0).matrix(), grid);
  CHECK((base - shifted).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("normalized_exp matches the analytic exponential density") {
  // scores s(t) = t: p(t) = e^t / (e - 1)
  const QuadratureGrid grid = uniform_grid(0.0, 1.0, 1000);
  const Vector density = normalized_exp(grid.points, grid);
  const double z = std::exp(1.0) - 1.0;
  for (int k = 0; k < grid.size(); k += 37) {
    const double expected = std::exp(grid.points(k)) / z;
    CHECK(density(k) == doctest::Approx(expected).epsilon(1e-5));
  }
  CHECK(integrate(density, grid) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("normalized_exp survives extreme scores") {
  const QuadratureGrid grid = uniform_grid(0.0, 1.0, 64);
  Vector scores = Vector::Constant(64, -5000.0);
  scores(10) = 5000.0;
  const Vector density = normalized_exp(scores, grid);
  CHECK(density.minCoeff() >= 0.0);
  CHECK(integrate(density, grid) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("inverse_cdf_sample stratified uniform quantiles") {
  const QuadratureGrid grid = uniform_grid(0.0, 1.0, 1000);
  const Vector uniform = Vector::Ones(1000);

  const Vector four =
      inverse_cdf_sample(uniform, grid, 4, QuantileMode::Stratified);
  REQUIRE(four.size() == 4);
  CHECK(four(0) == doctest::Approx(0.125).epsilon(1e-12));
  CHECK(four(1) == doctest::Approx(0.375).epsilon(1e-12));
  CHECK(four(2) == doctest::Approx(0.625).epsilon(1e-12));
  CHECK(four(3) == doctest::Approx(0.875).epsilon(1e-12));

  const Vector one =
      inverse_cdf_sample(uniform, grid, 1, QuantileMode::Stratified);
  CHECK(one(0) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("inverse_cdf_sample keeps a narrow bump's support") {
  // triangle on [0.45, 0.55], apex height 20 at 0.5: integrates to 1
  const int count = 1001;
  const QuadratureGrid grid = uniform_grid(0.0, 1.0, count);
  Vector density = Vector::Zero(count);
  for (int k = 0; k < count; ++k) {
    const double t = grid.points(k);
    if (t >= 0.45 && t <= 0.55) {
      density(k) = std::max(0.0, 20.0 * (1.0 - std::abs(t - 0.5) / 0.05));
    }
  }
  const Vector samples =
      inverse_cdf_sample(density, grid, 8, QuantileMode::Stratified);
  for (int i = 0; i < 8; ++i) {
    CHECK(samples(i) >= 0.45);
    CHECK(samples(i) <= 0.55);
  }
  // sorted ascending
  for (int i = 1; i < 8; ++i) {
    CHECK(samples(i) >= samples(i - 1));
  }
}

TEST_CASE("inverse_cdf_sample is deterministic and validates input") {
  const QuadratureGrid grid = uniform_grid(0.0, 1.0, 501);
  Vector density = normalized_exp(grid.points, grid);

  const Vector a = inverse_cdf_sample(density, grid, 9, QuantileMode::Stratified);
  const Vector b = inverse_cdf_sample(density, grid, 9, QuantileMode::Stratified);
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(inverse_cdf_sample(Vector::Zero(501), grid, 4,
                                     QuantileMode::Stratified),
                  DegenerateDensityError);
  CHECK_THROWS_AS(inverse_cdf_sample(Vector::Ones(501) * 2.0, grid, 4,
                                     QuantileMode::Stratified),
                  std::invalid_argument);
  Vector negative = density;
  negative(5) = -0.1;
  CHECK_THROWS_AS(inverse_cdf_sample(negative, grid, 4, QuantileMode::Stratified),
                  std::invalid_argument);
}

TEST_CASE("inverse_cdf_sample random mode is seeded and sorted") {
  const QuadratureGrid grid = uniform_grid(0.0, 1.0, 301);
  const Vector uniform = Vector::Ones(301);
  const Vector a = inverse_cdf_sample(uniform, grid, 16, QuantileMode::Random, 42);
  const Vector b = inverse_cdf_sample(uniform, grid, 16, QuantileMode::Random, 42);
  const Vector c = inverse_cdf_sample(uniform, grid, 16, QuantileMode::Random, 43);
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a - c).cwiseAbs().maxCoeff() > 0.0);
  for (int i = 1; i < 16; ++i) {
    CHECK(a(i) >= a(i - 1));
  }
}

TEST_CASE("sample_histogram splits mass by quantile arithmetic") {
  Vector histogram(2);
  histogram << 0.7, 0.3;
  const Vector samples =
      sample_histogram(histogram, 10, QuantileMode::Stratified);
  int in_first = 0;
  for (int i = 0; i < 10; ++i) {
    if (samples(i) < 0.5) ++in_first;
  }
  CHECK(in_first == 7);
}

TEST_CASE("sample_histogram concentrates on a one-hot bin") {
  Vector histogram = Vector::Zero(8);
  histogram(3) = 1.0;
  const Vector samples = sample_histogram(histogram, 6, QuantileMode::Stratified);
  for (int i = 0; i < 6; ++i) {
    CHECK(samples(i) >= 3.0 / 8.0);
    CHECK(samples(i) <= 4.0 / 8.0);
  }
  CHECK_THROWS_AS(sample_histogram(Vector::Zero(8), 4, QuantileMode::Stratified),
                  DegenerateDensityError);
}

TEST_CASE("sample_histogram of a uniform histogram equals plain quantiles") {
  const Vector histogram = Vector::Constant(64, 1.0 / 64.0);
  const Vector samples = sample_histogram(histogram, 10, QuantileMode::Stratified);
  for (int i = 0; i < 10; ++i) {
    CHECK(samples(i) == (i + 0.5) / 10.0);  // bit-equal
  }
}

TEST_CASE("interval_mass integrates piecewise-linear segments exactly") {
  const QuadratureGrid grid = uniform_grid(0.0, 1.0, 11);
  const Vector ramp = grid.points;
  // integral of t over [0.25, 0.85] = (0.85^2 - 0.25^2)/2
  CHECK(interval_mass(ramp, grid, 0.25, 0.85) ==
        doctest::Approx((0.85 * 0.85 - 0.25 * 0.25) / 2).epsilon(1e-12));
  // full span equals integrate
  CHECK(interval_mass(ramp, grid, 0.0, 1.0) ==
        doctest::Approx(integrate(ramp, grid)).epsilon(1e-12));
  // empty and clamped spans
  CHECK(interval_mass(ramp, grid, 0.6, 0.6) == 0.0);
  CHECK(interval_mass(ramp, grid, -5.0, 0.0) == 0.0);
}

TEST_CASE("interpolate is linear between grid points") {
  const QuadratureGrid grid = uniform_grid(0.0, 1.0, 5);
  Vector values(5);
  values << 0.0, 1.0, 4.0, 9.0, 16.0;
  CHECK(interpolate(values, grid, 0.125) == doctest::Approx(0.5));
  CHECK(interpolate(values, grid, 0.25) == doctest::Approx(1.0));
  CHECK(interpolate(values, grid, 1.0) == doctest::Approx(16.0));
  CHECK(interpolate(values, grid, -0.5) == doctest::Approx(0.0));
}
