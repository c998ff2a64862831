#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <vector>

#include "doctest.h"
#include "volpot/fundsol.hpp"
#include "volpot/schauder.hpp"

using namespace volpot;

namespace {

const Domain& unit_disk() {
  static const Domain d = Domain::make_ball(2, make_point(0.0, 0.0), 1.0);
  return d;
}

std::vector<Point> line_grid(int m) {
  std::vector<Point> pts;
  for (int i = 0; i <= m; ++i) pts.push_back(make_point(static_cast<double>(i) / m, 0.0));
  return pts;
}

std::vector<Complex> sample(const std::vector<Point>& pts, const std::function<double(double)>& f) {
  std::vector<Complex> v;
  for (const auto& p : pts) v.emplace_back(f(p(0)));
  return v;
}

std::vector<Point> disk_cloud(int rings, int per_ring) {
  std::vector<Point> pts;
  for (int i = 1; i <= rings; ++i) {
    const double r = 0.99 * i / rings;
    for (int k = 0; k < per_ring; ++k) {
      const double t = 2.0 * kPi * (k + 0.5 * (i % 2)) / per_ring;
      pts.push_back(make_point(r * std::cos(t), r * std::sin(t)));
    }
  }
  return pts;
}

}  // namespace

TEST_CASE("omega theta") {
  CHECK(omega_theta_eval(1.0, 0.0) == 0.0);
  CHECK(std::abs(omega_theta_eval(1.0, std::exp(-1.0)) - std::exp(-1.0)) < 1e-15);
  CHECK(std::abs(omega_theta_eval(1.0, 1.0) - std::exp(-1.0)) < 1e-15);
  CHECK(std::abs(omega_theta_eval(0.5, 0.01) - 0.1 * std::log(100.0)) < 1e-14);
  CHECK(std::abs(omega_theta_eval(0.5, 5.0) - std::exp(-1.0) * 2.0) < 1e-14);

  for (const double theta : {0.25, 0.5, 1.0}) {
    const auto m = Modulus::omega_theta(theta);
    CHECK(m.warnings().empty());
    double worst = 0.0;
    for (int i = 0; i <= 80; ++i) {
      const double t = std::pow(10.0, -8.0 + 8.0 * i / 80.0);
      for (int k = 0; k <= 40; ++k) {
        const double a = std::pow(100.0, k / 40.0);
        worst = std::max(worst, m(a * t) / (a * m(t)));
      }
    }
    CHECK(worst <= 1.0 + 1e-12);
  }
}

TEST_CASE("modulus parsing and custom moduli") {
  const auto p = Modulus::parse("power:0.5");
  CHECK(p.kind() == ModulusKind::power);
  CHECK(p.parameter() == 0.5);
  CHECK(std::abs(p(0.25) - 0.5) < 1e-15);
  const auto o = Modulus::parse("omega:1.0");
  CHECK(o.kind() == ModulusKind::omega_theta);
  CHECK(o.parameter() == 1.0);
  CHECK_THROWS_AS(Modulus::parse("power"), DomainError);
  CHECK_THROWS_AS(Modulus::parse("power:abc"), DomainError);
  CHECK_THROWS_AS(Modulus::parse("power:0.5x"), DomainError);
  CHECK_THROWS_AS(Modulus::parse("sobolev:1"), DomainError);
  CHECK_THROWS(Modulus::power(0.0));
  CHECK_THROWS(Modulus::power(1.5));

  CHECK(Modulus::custom([](double r) { return std::sqrt(r); }).warnings().empty());
  CHECK_FALSE(Modulus::custom([](double r) { return r * r; }).warnings().empty());
  CHECK_FALSE(Modulus::custom([](double r) { return 1.0 + r; }).warnings().empty());
  CHECK_FALSE(Modulus::custom([](double r) { return r < 0.5 ? r : 1.0 - r; }).warnings().empty());
}

TEST_CASE("holder seminorm") {
  const auto grid = line_grid(64);
  CHECK(std::abs(holder_seminorm(grid, sample(grid, [](double x) { return x; }), Modulus::power(1.0)) - 1.0) <
        1e-12);
  CHECK(holder_seminorm(grid, sample(grid, [](double) { return 3.0; }), Modulus::power(0.5)) == 0.0);

  std::vector<Point> dyadic{make_point(0.0, 0.0)};
  for (int k = 0; k <= 30; ++k) dyadic.push_back(make_point(std::ldexp(1.0, -k), 0.0));
  CHECK(std::abs(holder_seminorm(dyadic, sample(dyadic, [](double x) { return std::sqrt(x); }),
                                 Modulus::power(0.5)) -
                 1.0) < 1e-12);

  std::vector<Point> dup{make_point(0.1, 0.0), make_point(0.1, 0.0), make_point(0.5, 0.0)};
  std::vector<Complex> vals{1.0, 2.0, 0.0};
  CHECK_THROWS_AS(holder_seminorm(dup, vals, Modulus::power(1.0)), InconsistentSampleError);
  vals[1] = 1.0;
  CHECK_NOTHROW(holder_seminorm(dup, vals, Modulus::power(1.0)));
}

TEST_CASE("seminorm tail bound") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Point> pts;
    std::vector<Complex> vals;
    double sup = 0.0;
    for (int i = 0; i < 60; ++i) {
      pts.push_back(make_point(u(rng), u(rng)));
      vals.emplace_back(u(rng));
      sup = std::max(sup, std::abs(vals.back()));
    }
    for (const auto& m : {Modulus::power(0.5), Modulus::omega_theta(1.0)}) {
      for (const double a : {0.05, 0.3, 1.0}) {
        SeparationBand band;
        band.min_separation = a;
        CHECK(holder_seminorm(pts, vals, m, band) <= 2.0 * sup / m(a) * (1.0 + 1e-14));
      }
    }
  }
}

TEST_CASE("seminorm monotone under inclusion") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto f = [](const Point& p) { return std::sqrt(std::abs(p(0) - 0.3)) + p(1); };
  std::vector<Point> pts;
  std::vector<Complex> vals;
  double prev = 0.0;
  for (int i = 0; i < 200; ++i) {
    pts.push_back(make_point(u(rng), u(rng)));
    vals.emplace_back(f(pts.back()));
    if (pts.size() < 2) continue;
    const double s = holder_seminorm(pts, vals, Modulus::omega_theta(0.5));
    CHECK(s >= prev);
    prev = s;
  }
}

TEST_CASE("embedding chain") {
  // On sets of diameter <= 1: r / omega_1(r) <= e and omega_1(r) / sqrt(r) <= 2/e.
  const double c = std::exp(1.0);
  const double c_prime = 1.0;
  const auto grid = line_grid(200);
  const std::vector<std::function<double(double)>> fs = {
      [](double x) { return x; },
      [](double x) { return std::sin(5.0 * x); },
      [](double x) { return x * std::log(x + 1e-300); },
      [](double x) { return std::abs(x - 0.37); },
      [](double x) { return x * x * x - x; },
  };
  for (const auto& f : fs) {
    const auto v = sample(grid, f);
    double sup = 0.0;
    for (const auto& z : v) sup = std::max(sup, std::abs(z));
    const double lip = holder_seminorm(grid, v, Modulus::power(1.0));
    const double om = holder_seminorm(grid, v, Modulus::omega_theta(1.0));
    const double half = holder_seminorm(grid, v, Modulus::power(0.5));
    CHECK(om <= c * lip * (1.0 + 1e-12));
    CHECK(half <= c_prime * (om + sup) * (1.0 + 1e-12));
  }
}

TEST_CASE("kernel class norm") {
  const auto cloud = disk_cloud(6, 24);
  const auto one = [](const Point&, const Point&) { return Complex(1.0); };
  const auto k1 = kernel_class_norm(one, cloud, cloud, 0.0, 1.0, 1.0);
  CHECK(k1.decay == 1.0);
  CHECK(k1.regularity == 0.0);
  CHECK(k1.total() == 1.0);

  const auto inv = [](const Point& x, const Point& y) { return Complex(1.0 / (x - y).norm()); };
  const auto coarse = kernel_class_norm(inv, disk_cloud(4, 16), disk_cloud(4, 16), 1.0, 2.0, 1.0);
  const auto fine = kernel_class_norm(inv, disk_cloud(8, 32), disk_cloud(8, 32), 1.0, 2.0, 1.0);
  CHECK(std::abs(coarse.decay - 1.0) < 1e-12);
  CHECK(fine.total() <= 3.0 + 1e-12);
  CHECK(fine.total() >= coarse.total());
  CHECK(fine.total() > 2.5);

  const auto fs = FundamentalSolution::laplace(2);
  const auto d1s = [&](const Point& x, const Point& y) { return Complex(fs.grad(x - y)(0)); };
  const double a = kernel_class_norm(d1s, disk_cloud(6, 24), disk_cloud(6, 24), 1.0, 2.0, 1.0).total();
  const double b = kernel_class_norm(d1s, disk_cloud(12, 48), disk_cloud(12, 48), 1.0, 2.0, 1.0).total();
  CHECK(std::isfinite(b));
  CHECK(std::abs(b - a) <= 0.05 * b);
}

TEST_CASE("pairings") {
  const auto zero = density::constant(0.0);
  SUBCASE("integral functional") {
    const auto nd_f0 = make_negative_density(unit_disk(), {density::x1sq(), zero, zero}, 1.0);
    CHECK(std::abs(integral_functional_I(unit_disk(), nd_f0, 32) - kPi / 4.0) < 1e-10);
    const auto nd_div = make_negative_density(unit_disk(), {zero, density::x1(), zero}, 1.0);
    CHECK(std::abs(integral_functional_I(unit_disk(), nd_div, 32) - kPi) < 1e-10);
    const auto nd_one = make_negative_density(unit_disk(), {density::one(), zero, zero}, 1.0);
    CHECK(std::abs(integral_functional_I(unit_disk(), nd_one, 32) - integral_functional_I(unit_disk(), nd_div, 32)) <
          1e-10);
  }
  SUBCASE("extension pairing") {
    const auto nd = make_negative_density(unit_disk(), {density::cos_k(1.5), density::x1sq(), density::x1()}, 1.0);
    CHECK(std::abs(extension_pairing_E(unit_disk(), nd, density::one(), 32) - integral_functional_I(unit_disk(), nd, 32)) <
          1e-12);
    const auto nd_div = make_negative_density(unit_disk(), {zero, density::x1(), zero}, 1.0);
    CHECK(std::abs(extension_pairing_E(unit_disk(), nd_div, density::x1(), 32)) < 1e-10);
    const auto f = density::cos_k(2.0);
    const auto v = density::x1sq();
    const auto nd_f = make_negative_density(unit_disk(), {f, zero, zero}, 1.0);
    CHECK(std::abs(extension_pairing_E(unit_disk(), nd_f, v, 32) - canonical_pairing_J(unit_disk(), f, v, 32)) <
          1e-10);
  }
  SUBCASE("canonical pairing") {
    CHECK(std::abs(canonical_pairing_J(unit_disk(), density::one(), density::one(), 32) - kPi) < 1e-12);
    CHECK(canonical_pairing_J(unit_disk(), density::cos_k(1.0), density::constant(0.0), 16) == Complex(0.0));
    // J[d1 g] against v agrees with E on (0, g, 0)
    const auto g = density::x1sq();
    const auto v = density::cos_k(1.0);
    const auto nd = make_negative_density(unit_disk(), {zero, g, zero}, 1.0);
    CHECK(std::abs(extension_pairing_E(unit_disk(), nd, v, 32) - canonical_pairing_J(unit_disk(), g.partial(0), v, 32)) <
          1e-10);
  }
}

TEST_CASE("negative density sup bound") {
  const auto nd = make_negative_density(unit_disk(), {density::x1sq(), density::x1(), density::coordinate(1)}, 1.0);
  CHECK(nd.norm_bound >= 0.0);
  double sup = 0.0;
  for (const auto& p : closure_samples(unit_disk(), 16)) sup = std::max(sup, std::abs(nd.realized(p)));
  CHECK(sup <= nd.norm_bound);

  const auto nd2 = make_negative_density(unit_disk(), {density::cos_k(3.0), density::cos_k(2.0), density::x1sq()}, 1.0);
  sup = 0.0;
  for (const auto& p : closure_samples(unit_disk(), 16)) sup = std::max(sup, std::abs(nd2.realized(p)));
  CHECK(sup <= nd2.norm_bound);
}

TEST_CASE("sample csv round trip") {
  SampleCloud cloud;
  cloud.points = {make_point(0.1, 0.2), make_point(-1.0 / 3.0, 2.0), make_point(1e-17, -5.5)};
  cloud.values = {1.0, -std::sqrt(2.0), 1.0 / 7.0};
  const auto path = (std::filesystem::temp_directory_path() / "volpot_samples_roundtrip.csv").string();
  write_samples_csv(path, cloud);
  const auto back = read_samples_csv(path, 2);
  std::remove(path.c_str());
  REQUIRE(back.points.size() == cloud.points.size());
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    CHECK(back.points[i] == cloud.points[i]);
    CHECK(back.values[i] == cloud.values[i]);
  }
  CHECK_THROWS_AS(read_samples_csv(path, 2), DomainError);
}
