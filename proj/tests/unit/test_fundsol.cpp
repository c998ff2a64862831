#include <cmath>
#include <random>

#include "doctest.h"
#include "volpot/bessel.hpp"
#include "volpot/fundsol.hpp"

using namespace volpot;

namespace {

constexpr double kE = 2.718281828459045;

// Reference values from mpmath at 30 digits.
struct BesselRow {
  double x, k0, k1, i0, i1;
};
constexpr BesselRow kBessel[] = {
    {1e-3, 7.023688800562382, 999.9962381560856, 1.0000002500000156, 0.0005000000625000026},
    {0.1, 2.4270690247020164, 9.853844780870606, 1.0025015629340956, 0.050062526047092694},
    {0.5, 0.9244190712276659, 1.656441120003301, 1.0634833707413236, 0.2578943053908963},
    {1.0, 0.42102443824070834, 0.6019072301972346, 1.2660658777520084, 0.565159103992485},
    {1.9999, 0.11390786025689362, 0.13988426583169103, 2.27942624607173, 1.5904884341804395},
    {2.0, 0.11389387274953344, 0.13986588181652243, 2.2795853023360673, 1.590636854637329},
    {2.0001, 0.11387988708044136, 0.1398475004688114, 2.2797443734430733, 1.5907852875558453},
    {3.7, 0.01563065992162666, 0.01762803510222326, 8.738617524169397, 7.435745796535337},
    {10.0, 1.778006231616765e-05, 1.8648773453825585e-05, 2815.7166284662544, 2670.9883037012546},
    {30.0, 2.1324774964630563e-14, 2.1677320018915495e-14, 781672297823.9775, 768532038938.957},
};

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

Matrix mat2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

Point random_point(int n, std::mt19937_64& rng, double rmin, double rmax) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(rmin, rmax);
  Point p(n);
  for (int i = 0; i < n; ++i) p(i) = g(rng);
  return (u(rng) / p.norm()) * p;
}

}  // namespace

TEST_CASE("bessel functions") {
  for (const auto& row : kBessel) {
    CAPTURE(row.x);
    CHECK(rel(bessel::k0(row.x), row.k0) < 1e-13);
    CHECK(rel(bessel::k1(row.x), row.k1) < 1e-13);
    CHECK(rel(bessel::i0(row.x), row.i0) < 1e-13);
    CHECK(rel(bessel::i1(row.x), row.i1) < 1e-13);
  }
  SUBCASE("branches agree at the switchover") {
    const double s = bessel::kSeriesLimit;
    CHECK(rel(bessel::k0(std::nextafter(s, 0.0)), bessel::k0(std::nextafter(s, 10.0))) < 1e-12);
    CHECK(rel(bessel::k1(std::nextafter(s, 0.0)), bessel::k1(std::nextafter(s, 10.0))) < 1e-12);
  }
  SUBCASE("x K1(x) - 1 for small x") {
    // x K1(x) - 1 = (x^2/2) ln(x/2) + O(x^2)
    const double x = 1e-6;
    const double expected = 0.5 * x * x * (std::log(x / 2.0) + 0.5772156649015329 - 0.5);
    CHECK(rel(bessel::x_k1_minus_one(x), expected) < 1e-6);
    CHECK(rel(bessel::x_k1_minus_one(1.0), 0.6019072301972346 - 1.0) < 1e-13);
  }
}

TEST_CASE("laplace fundamental solution") {
  CHECK(laplace_Sn(2, make_point(1.0, 0.0)) == 0.0);
  CHECK(rel(laplace_Sn(2, make_point(kE, 0.0)), 1.0 / (2.0 * kPi)) < 1e-15);
  CHECK(rel(laplace_Sn(3, make_point(0.0, 1.0, 0.0)), -1.0 / (4.0 * kPi)) < 1e-15);
  CHECK_THROWS_AS(laplace_Sn(2, make_point(0.0, 0.0)), SingularPointError);

  const auto fs = FundamentalSolution::laplace(2);
  const Vector g = fs.grad(make_point(1.0, 0.0));
  CHECK(std::abs(g(0) - 1.0 / (2.0 * kPi)) < 1e-15);
  CHECK(g(1) == 0.0);
  const Matrix h = fs.hess(make_point(1.0, 0.0));
  CHECK((h - mat2(-1, 0, 0, 1) / (2.0 * kPi)).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(std::abs(fs.hess(make_point(0.5, 0.5)).trace()) < 1e-12);
  CHECK_THROWS_AS(fs.grad(make_point(0.0, 0.0)), SingularPointError);
  CHECK_THROWS_AS(fs.hess(make_point(0.0, 0.0)), SingularPointError);
}

TEST_CASE("closed forms over a range of radii") {
  std::mt19937_64 rng(3);
  for (int n : {2, 3}) {
    const auto lap = FundamentalSolution::laplace(n);
    const auto mh = FundamentalSolution::modified_helmholtz(n, 1.3);
    for (int i = 0; i < 40; ++i) {
      const double r = std::pow(10.0, -3.0 + 4.0 * i / 39.0);
      const Point x = random_point(n, rng, r, r);
      const double rr = x.norm();
      const double lap_exact = n == 2 ? std::log(rr) / (2.0 * kPi) : -1.0 / (4.0 * kPi * rr);
      const double mh_exact =
          n == 2 ? -bessel::k0(1.3 * rr) / (2.0 * kPi) : -std::exp(-1.3 * rr) / (4.0 * kPi * rr);
      CAPTURE(rr);
      if (std::abs(lap_exact) > 1e-300) CHECK(rel(lap.eval(x), lap_exact) < 1e-12);
      CHECK(rel(mh.eval(x), mh_exact) < 1e-12);
    }
  }
}

TEST_CASE("anisotropic fundamental solution") {
  const auto lap = OperatorCoefficients::laplacian(2);
  const Point p = make_point(0.3, 0.7);
  CHECK(principal_anisotropic(lap, p) == doctest::Approx(laplace_Sn(2, p)).epsilon(1e-15));

  const auto op = OperatorCoefficients::make(mat2(4, 0, 0, 1));
  CHECK(std::abs(principal_anisotropic(op, make_point(2.0, 0.0))) < 1e-16);

  // 4 d11 S + d22 S by central differences.
  const double h = 1e-4;
  auto s = [&](double a, double b) { return principal_anisotropic(op, make_point(a, b)); };
  const double d11 = (s(0.3 + h, 0.7) - 2.0 * s(0.3, 0.7) + s(0.3 - h, 0.7)) / (h * h);
  const double d22 = (s(0.3, 0.7 + h) - 2.0 * s(0.3, 0.7) + s(0.3, 0.7 - h)) / (h * h);
  CHECK(std::abs(4.0 * d11 + d22) <= 1e-6 * std::abs(s(0.3, 0.7)));

  CHECK_THROWS_AS(principal_anisotropic(op, make_point(0.0, 0.0)), SingularPointError);

  Matrix a2 = Matrix::Identity(2, 2);
  CVector a1 = CVector::Zero(2);
  a1(0) = 1.0;
  CHECK_THROWS_AS(FundamentalSolution::principal(OperatorCoefficients::make(a2, a1, 0.0)),
                  UnsupportedOperatorError);
}

TEST_CASE("modified helmholtz fundamental solution") {
  const Point x3 = make_point(0.2, -0.5, 0.4);
  // The kappa -> 0 gap is (1 - exp(-kappa r))/(4 pi r) = kappa/(4 pi) + O(kappa^2 r).
  const double gap = modified_helmholtz(3, 1e-6, x3) - laplace_Sn(3, x3);
  CHECK(std::abs(gap - 1e-6 / (4.0 * kPi)) < 1e-13);
  CHECK(std::abs(modified_helmholtz(3, 1e-9, x3) - laplace_Sn(3, x3)) < 1e-10);
  CHECK(std::abs(modified_helmholtz(3, 1.0, make_point(1.0, 0.0, 0.0)) - (-0.029274915762159584)) < 1e-15);
  CHECK(std::abs(modified_helmholtz(2, 1.0, make_point(1.0, 0.0)) - (-0.06700812050849712)) < 1e-15);
  CHECK_THROWS_AS(modified_helmholtz(2, 1.0, make_point(0.0, 0.0)), SingularPointError);

  const auto fs3 = FundamentalSolution::modified_helmholtz(3, 1.0);
  const Vector g = fs3.grad(make_point(1.0, 0.0, 0.0));
  CHECK(std::abs(g(0) - 2.0 / (kE * 4.0 * kPi)) < 1e-15);
  CHECK(std::abs(g(1)) < 1e-18);
  CHECK(std::abs(g(2)) < 1e-18);

  for (int n : {2, 3}) {
    const auto fs = FundamentalSolution::modified_helmholtz(n, 1.0);
    Point x = Point::Zero(n);
    x(0) = 0.6;
    x(1) = 0.8;
    CHECK(std::abs(fs.hess(x).trace() - fs.eval(x)) < 1e-10);
  }
}

TEST_CASE("operator selection") {
  CHECK(FundamentalSolution::for_operator(OperatorCoefficients::laplacian(3)).kind() == FundamentalKind::laplace);
  CHECK(FundamentalSolution::for_operator(OperatorCoefficients::modified_helmholtz(2, 2.0)).kind() ==
        FundamentalKind::modified_helmholtz);
  CHECK(FundamentalSolution::for_operator(OperatorCoefficients::make(mat2(2, 1, 1, 2))).kind() ==
        FundamentalKind::principal);
  Matrix a2 = Matrix::Identity(2, 2);
  CVector a1 = CVector::Zero(2);
  a1(1) = 1.0;
  CHECK_THROWS_AS(FundamentalSolution::for_operator(OperatorCoefficients::make(a2, a1, 0.0)),
                  UnsupportedOperatorError);
}

TEST_CASE("gradient kernel split") {
  std::mt19937_64 rng(5);
  const auto lap2 = FundamentalSolution::laplace(2);
  const auto lap3 = FundamentalSolution::laplace(3);
  for (int i = 0; i < 20; ++i) {
    for (const auto* fs : {&lap2, &lap3}) {
      const Point x = random_point(fs->dim(), rng, 0.1, 3.0);
      for (int j = 0; j < fs->dim(); ++j) CHECK(fs->gradient_split(j, x).second == 0.0);
    }
  }

  const std::vector<FundamentalSolution> all = {
      FundamentalSolution::laplace(2), FundamentalSolution::laplace(3),
      FundamentalSolution::modified_helmholtz(2, 1.0), FundamentalSolution::modified_helmholtz(3, 2.0),
      FundamentalSolution::principal(OperatorCoefficients::make(mat2(3, 0.4, 0.4, 1)))};
  for (const auto& fs : all) {
    const int n = fs.dim();
    for (int i = 0; i < 20; ++i) {
      const Point x = random_point(n, rng, 0.05, 3.0);
      const Vector g = fs.grad(x);
      for (int j = 0; j < n; ++j) {
        const auto [k1, k2] = fs.gradient_split(j, x);
        CHECK(k1 + k2 == g(j));
        CHECK(fs.gradient_split(j, Point(-x)).first == -k1);
        CHECK(fs.gradient_split(j, Point(2.0 * x)).first == std::ldexp(k1, -(n - 1)));
      }
    }
  }

  SUBCASE("3D remainder bound near the origin") {
    const auto fs = FundamentalSolution::modified_helmholtz(3, 1.0);
    const Vector dir = make_point(0.48, 0.6, 0.64);
    const double first = std::pow(0.1, 1.5) * fs.remainder_gradient(Point(0.1 * dir)).norm();
    for (double r = 1e-2; r >= 1e-6; r /= 10.0) {
      CAPTURE(r);
      CHECK(std::pow(r, 1.5) * fs.remainder_gradient(Point(r * dir)).norm() <= 1.01 * first);
    }
  }
}

TEST_CASE("homogeneous equation off the origin") {
  std::mt19937_64 rng(9);
  const std::vector<std::pair<FundamentalSolution, OperatorCoefficients>> cases = {
      {FundamentalSolution::laplace(2), OperatorCoefficients::laplacian(2)},
      {FundamentalSolution::laplace(3), OperatorCoefficients::laplacian(3)},
      {FundamentalSolution::modified_helmholtz(2, 1.5), OperatorCoefficients::modified_helmholtz(2, 1.5)},
      {FundamentalSolution::modified_helmholtz(3, 0.7), OperatorCoefficients::modified_helmholtz(3, 0.7)},
      {FundamentalSolution::principal(OperatorCoefficients::make(mat2(2, 0.3, 0.3, 1))),
       OperatorCoefficients::make(mat2(2, 0.3, 0.3, 1))},
  };
  for (const auto& [fs, op] : cases) {
    const int n = fs.dim();
    const ScalarField u = [&fs](const Point& y) { return Complex(fs.eval(y)); };
    for (int i = 0; i < 50; ++i) {
      const Point x = random_point(n, rng, 0.2, 2.0);
      const double h = 2e-4 * x.norm();
      const Matrix hs = fs.hess(x);
      double largest = std::abs(op.a0()) * std::abs(fs.eval(x));
      for (int l = 0; l < n; ++l) {
        for (int j = 0; j < n; ++j) largest = std::max(largest, std::abs(op.a2()(l, j) * hs(l, j)));
      }
      CHECK(std::abs(apply_operator_fd(op, u, x, h)) <= 1e-6 * largest);
    }
  }
}

TEST_CASE("laplace rotational symmetry") {
  std::mt19937_64 rng(13);
  for (int n : {2, 3}) {
    const auto fs = FundamentalSolution::laplace(n);
    for (int i = 0; i < 20; ++i) {
      std::normal_distribution<double> g;
      Matrix a(n, n);
      for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) a(r, c) = g(rng);
      }
      const Matrix q = Eigen::HouseholderQR<Matrix>(a).householderQ();
      const Point x = random_point(n, rng, 0.3, 3.0);
      CHECK(std::abs(fs.eval(Point(q * x)) - fs.eval(x)) < 1e-14);
    }
  }
}
