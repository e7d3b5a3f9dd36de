#include "contmem/basis.hpp"

#include "doctest.h"

#include <cmath>

using namespace contmem;
using namespace contmem::basis;

TEST_CASE("rectangular psi is a one-hot box indicator") {
  const BasisFamily rect = rectangular(4);

  Vector psi = eval_psi(rect, 0.3);
  CHECK(psi(0) == 0.0);
  CHECK(psi(1) == 1.0);  // 0.3 in [0.25, 0.5)
  CHECK(psi(2) == 0.0);
  CHECK(psi(3) == 0.0);

  // the right endpoint belongs to the last box
  psi = eval_psi(rect, 1.0);
  CHECK(psi(3) == 1.0);
  CHECK(psi.sum() == 1.0);

  psi = eval_psi(rect, 0.0);
  CHECK(psi(0) == 1.0);
}

TEST_CASE("rectangular psi sums to exactly one everywhere") {
  const BasisFamily rect = rectangular(7);
  for (int k = 0; k <= 100; ++k) {
    const Vector psi = eval_psi(rect, k / 100.0);
    CHECK(psi.sum() == 1.0);
    CHECK(psi.maxCoeff() == 1.0);
  }
}

TEST_CASE("box boundaries are right-open") {
  CHECK(box_index(4, 0.25) == 1);
  CHECK(box_index(4, 0.4999999) == 1);
  CHECK(box_index(4, 0.5) == 2);
  CHECK(box_index(4, 1.0) == 3);
  CHECK(box_index(1, 0.999) == 0);
}

TEST_CASE("gaussian psi evaluates the bump formula") {
  const BasisFamily rbf = gaussian_rbf(2, 0.5);
  const Vector psi = eval_psi(rbf, 0.25);
  // centers at 0.25 and 0.75: exp(0) and exp(-0.5^2 / (2 * 0.5^2))
  CHECK(psi(0) == 1.0);
  CHECK(psi(1) == doctest::Approx(std::exp(-0.5)).epsilon(1e-14));
  CHECK(psi.minCoeff() > 0.0);
}

TEST_CASE("gaussian default width is 1/N") {
  const BasisFamily rbf = gaussian_rbf(8);
  CHECK(rbf.width() == doctest::Approx(0.125));
}

TEST_CASE("psi rejects out-of-domain times") {
  const BasisFamily rect = rectangular(4);
  CHECK_THROWS_AS(eval_psi(rect, -0.01), std::domain_error);
  CHECK_THROWS_AS(eval_psi(rect, 1.01), std::domain_error);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(eval_psi(rect, nan), std::domain_error);
}

TEST_CASE("basis family validation") {
  CHECK_THROWS_AS(rectangular(0), std::invalid_argument);
  CHECK_THROWS_AS(gaussian_rbf(4, -1.0), std::invalid_argument);
}

TEST_CASE("design matrix columns equal eval_psi") {
  Vector times(3);
  times << 0.1, 0.2, 0.6;

  const BasisFamily rect = rectangular(2);
  const Matrix f = design_matrix(rect, times);
  REQUIRE(f.rows() == 2);
  REQUIRE(f.cols() == 3);
  CHECK(f(0, 0) == 1.0);
  CHECK(f(0, 1) == 1.0);
  CHECK(f(1, 2) == 1.0);
  CHECK(f(1, 0) == 0.0);

  const BasisFamily rbf = gaussian_rbf(3);
  Vector single(1);
  single << 0.5;
  const Matrix g = design_matrix(rbf, single);
  const Vector psi = eval_psi(rbf, 0.5);
  for (int j = 0; j < 3; ++j) {
    CHECK(g(j, 0) == psi(j));  // bit-identical
  }
}

TEST_CASE("one frame per box gives the identity design matrix") {
  Vector times(2);
  times << 0.25, 0.75;
  const Matrix f = design_matrix(rectangular(2), times);
  CHECK(f(0, 0) == 1.0);
  CHECK(f(1, 1) == 1.0);
  CHECK(f(0, 1) == 0.0);
  CHECK(f(1, 0) == 0.0);
}

TEST_CASE("rectangular gram matrix is diagonal with box counts") {
  Vector times(6);
  times << 0.05, 0.1, 0.3, 0.62, 0.64, 0.66;
  const Matrix f = design_matrix(rectangular(4), times);
  const Matrix gram = f * f.transpose();
  CHECK(gram(0, 0) == 2.0);
  CHECK(gram(1, 1) == 1.0);
  CHECK(gram(2, 2) == 3.0);
  CHECK(gram(3, 3) == 0.0);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (i != j) CHECK(gram(i, j) == 0.0);
    }
  }
}
