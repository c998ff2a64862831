#include <cmath>
#include <random>

#include "doctest.h"
#include "volpot/operators.hpp"

using namespace volpot;

namespace {

Matrix mat2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

Matrix random_rotation(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = g(rng);
  }
  Eigen::HouseholderQR<Matrix> qr(a);
  return qr.householderQ();
}

}  // namespace

TEST_CASE("multi-index coefficients") {
  SUBCASE("laplacian keys give the identity") {
    const auto op = from_multiindex(2, {{{2, 0}, 1.0}, {{0, 2}, 1.0}});
    CHECK(op.a2().isApprox(Matrix::Identity(2, 2)));
    CHECK_FALSE(op.has_lower_order_terms());
  }
  SUBCASE("mixed key is split in half") {
    const auto op = from_multiindex(2, {{{1, 1}, 1.0}, {{2, 0}, 1.0}, {{0, 2}, 1.0}});
    CHECK(op.a2()(0, 1) == 0.5);
    CHECK(op.a2()(1, 0) == 0.5);
  }
  SUBCASE("zeroth order key passes through") {
    const auto op = from_multiindex(2, {{{0, 0}, -1.0}, {{2, 0}, 1.0}, {{0, 2}, 1.0}});
    CHECK(op.a0() == Complex(-1.0));
  }
  SUBCASE("complex second order coefficient") {
    CHECK_THROWS_AS(from_multiindex(2, {{{2, 0}, Complex(1.0, 0.5)}, {{0, 2}, 1.0}}), SymmetryError);
  }
  SUBCASE("non-elliptic") {
    CHECK_THROWS_AS(from_multiindex(2, {{{2, 0}, 1.0}, {{0, 2}, -1.0}}), EllipticityError);
    CHECK_THROWS_AS(from_multiindex(2, {{{2, 0}, 1.0}}), EllipticityError);
  }
  SUBCASE("complex drift is allowed") {
    const auto op = from_multiindex(2, {{{2, 0}, 1.0}, {{0, 2}, 1.0}, {{1, 0}, Complex(0.0, 2.0)}});
    CHECK(op.a1()(0) == Complex(0.0, 2.0));
    CHECK(op.has_lower_order_terms());
  }
}

TEST_CASE("construction checks") {
  CHECK_THROWS_AS(OperatorCoefficients::make(mat2(1, 0.3, 0.1, 1)), SymmetryError);
  CHECK_THROWS_AS(OperatorCoefficients::make(mat2(1, 2, 2, 1)), EllipticityError);
  CHECK_THROWS_AS(OperatorCoefficients::make(mat2(1e-13, 0, 0, 1)), EllipticityError);
  CHECK_NOTHROW(OperatorCoefficients::make(mat2(1e-11, 0, 0, 1)));
}

TEST_CASE("ellipticity margin") {
  CHECK(ellipticity_margin(OperatorCoefficients::laplacian(2)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(ellipticity_margin(OperatorCoefficients::make(mat2(4, 0, 0, 1))) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(ellipticity_margin(OperatorCoefficients::make(mat2(1, 0.9, 0.9, 1))) - 0.1) < 1e-14);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.5, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 2;
    Matrix d = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) d(i, i) = u(rng);
    const double expected = d.diagonal().minCoeff();
    const Matrix q = random_rotation(n, rng);
    Matrix a2 = q * d * q.transpose();
    a2 = 0.5 * (a2 + a2.transpose()).eval();
    CHECK(std::abs(ellipticity_margin(OperatorCoefficients::make(a2)) - expected) < 1e-12);
  }
}

TEST_CASE("principal factor") {
  CHECK(factor_principal(OperatorCoefficients::laplacian(3)).isApprox(Matrix::Identity(3, 3)));
  CHECK(factor_principal(OperatorCoefficients::make(mat2(4, 0, 0, 1))).isApprox(mat2(2, 0, 0, 1), 1e-15));
  const Matrix t = factor_principal(OperatorCoefficients::make(mat2(2, 1, 1, 2)));
  CHECK(std::abs(t(0, 0) - std::sqrt(2.0)) < 1e-15);
  CHECK(t(0, 1) == 0.0);
  CHECK(std::abs(t(1, 0) - 1.0 / std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(t(1, 1) - std::sqrt(1.5)) < 1e-15);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> expo(0.0, 6.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 2;
    Matrix d = Matrix::Zero(n, n);
    d(0, 0) = 1.0;
    d(1, 1) = std::pow(10.0, -expo(rng));
    if (n == 3) d(2, 2) = std::pow(10.0, -6.0);
    const Matrix q = random_rotation(n, rng);
    Matrix a2 = q * d * q.transpose();
    a2 = 0.5 * (a2 + a2.transpose()).eval();
    const auto op = OperatorCoefficients::make(a2);
    const Matrix f = factor_principal(op);
    CHECK((f * f.transpose() - op.a2()).cwiseAbs().maxCoeff() <= 1e-14 * op.a2().cwiseAbs().maxCoeff());
    for (int i = 0; i < n; ++i) CHECK(f(i, i) > 0.0);
  }
}

TEST_CASE("finite difference operator") {
  const Point x = make_point(0.3, -0.7);
  SUBCASE("quadratic is exact") {
    const ScalarField u = [](const Point& y) { return Complex(y.squaredNorm()); };
    CHECK(std::abs(apply_operator_fd(OperatorCoefficients::laplacian(2), u, x, 1e-2) - 4.0) < 1e-10);
    const ScalarField u3 = [](const Point& y) { return Complex(y.squaredNorm()); };
    CHECK(std::abs(apply_operator_fd(OperatorCoefficients::laplacian(3), u3, make_point(0.1, 0.2, 0.3), 1e-2) -
                   6.0) < 1e-10);
  }
  SUBCASE("modified helmholtz on exp") {
    const ScalarField u = [](const Point& y) { return Complex(std::exp(y(0))); };
    const auto op = OperatorCoefficients::modified_helmholtz(2, 1.0);
    CHECK(std::abs(apply_operator_fd(op, u, make_point(0.0, 0.0), 1e-4)) < 1e-7);
  }
  SUBCASE("drift on x1") {
    Matrix a2 = Matrix::Identity(2, 2);
    CVector a1 = CVector::Zero(2);
    a1(0) = 1.0;
    const auto op = OperatorCoefficients::make(a2, a1, 0.0);
    const ScalarField u = [](const Point& y) { return Complex(y(0)); };
    CHECK(std::abs(apply_operator_fd(op, u, x, 1e-3) - 1.0) < 1e-10);
  }
  SUBCASE("mixed derivatives") {
    const auto op = OperatorCoefficients::make(mat2(2, 0.5, 0.5, 1));
    const ScalarField u = [](const Point& y) { return Complex(y(0) * y(1)); };
    CHECK(std::abs(apply_operator_fd(op, u, x, 1e-2) - 1.0) < 1e-10);
  }
  SUBCASE("second order convergence") {
    const auto op = OperatorCoefficients::laplacian(2);
    const ScalarField u = [](const Point& y) { return Complex(std::sin(y(0)) * std::cos(y(1))); };
    const Point p = make_point(0.4, 0.3);
    const double exact = -2.0 * std::sin(0.4) * std::cos(0.3);
    const double e1 = std::abs(apply_operator_fd(op, u, p, 0.1) - exact);
    const double e2 = std::abs(apply_operator_fd(op, u, p, 0.05) - exact);
    CHECK(e1 / e2 >= 3.6);
    CHECK(e1 / e2 <= 4.4);
  }
}
