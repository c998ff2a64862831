#include <benchmark/benchmark.h>

#include "volpot/potentials.hpp"
#include "volpot/schauder.hpp"

namespace {

using namespace volpot;

const Domain& disk() {
  static const Domain d = Domain::make_ball(2, make_point(0.0, 0.0), 1.0);
  return d;
}

const Domain& ball() {
  static const Domain d = Domain::make_ball(3, make_point(0.0, 0.0, 0.0), 1.0);
  return d;
}

void BM_BesselK0(benchmark::State& state) {
  const auto fs = FundamentalSolution::modified_helmholtz(2, 1.0);
  double r = 0.01;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fs.eval(make_point(r, 0.0)));
    r = r < 8.0 ? r * 1.01 : 0.01;
  }
}
BENCHMARK(BM_BesselK0);

void BM_PolarRuleInterior(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(polar_rule(disk(), make_point(0.3, 0.2), N));
}
BENCHMARK(BM_PolarRuleInterior)->RangeMultiplier(2)->Range(16, 128);

void BM_PolarRuleNearBoundary(benchmark::State& state) {
  const auto star = Domain::make_cosine_star({1.0, 0.0, 0.0, 0.2}, make_point(0.0, 0.0));
  const Point x = star.boundary_point(0.4) * (1.0 - 1e-4);
  for (auto _ : state) benchmark::DoNotOptimize(polar_rule(star, x, 32));
}
BENCHMARK(BM_PolarRuleNearBoundary);

void BM_VolumePotential2D(benchmark::State& state) {
  const auto fs = FundamentalSolution::laplace(2);
  const auto f = density::x1sq();
  const int N = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(volume_potential(fs, disk(), f, make_point(0.3, 0.2), N));
}
BENCHMARK(BM_VolumePotential2D)->RangeMultiplier(2)->Range(16, 128);

void BM_VolumePotential3D(benchmark::State& state) {
  const auto fs = FundamentalSolution::modified_helmholtz(3, 1.0);
  const auto f = density::one();
  const int N = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(volume_potential(fs, ball(), f, make_point(0.1, 0.2, 0.3), N));
  }
}
BENCHMARK(BM_VolumePotential3D)->RangeMultiplier(2)->Range(8, 32);

void BM_Hessian2D(benchmark::State& state) {
  const auto fs = FundamentalSolution::laplace(2);
  const auto f = density::cos_k(2.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(volume_potential_hessian(fs, disk(), f, make_point(0.3, 0.2), 32));
  }
}
BENCHMARK(BM_Hessian2D);

void BM_SingleLayerOnSurface(benchmark::State& state) {
  const auto fs = FundamentalSolution::laplace(2);
  const BoundaryDensity phi = [](const Point& y, const Vector&) { return Complex(y(0) * y(0)); };
  for (auto _ : state) {
    benchmark::DoNotOptimize(single_layer(fs, disk(), phi, make_point(0.6, 0.8), static_cast<int>(state.range(0))));
  }
}
BENCHMARK(BM_SingleLayerOnSurface)->RangeMultiplier(2)->Range(16, 128);

void BM_HolderSeminorm(benchmark::State& state) {
  const auto pts = closure_samples(disk(), static_cast<int>(state.range(0)));
  std::vector<Complex> vals;
  for (const auto& p : pts) vals.emplace_back(std::abs(p(0)));
  const auto omega = Modulus::omega_theta(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(holder_seminorm(pts, vals, omega));
  state.SetComplexityN(static_cast<int64_t>(pts.size()));
}
BENCHMARK(BM_HolderSeminorm)->RangeMultiplier(2)->Range(8, 32)->Complexity(benchmark::oNSquared);

}  // namespace

BENCHMARK_MAIN();
