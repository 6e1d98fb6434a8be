#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "fbac/grid2d_solver.hpp"
#include "fbac/holder.hpp"
#include "fbac/radial_solver.hpp"
#include "fbac/redistance.hpp"

using namespace fbac;

static void BM_RadialStep(benchmark::State& st) {
  const int M = static_cast<int>(st.range(0));
  const RadialState s0 = init_from_sphere(1.0, 2, 0.05, M);
  SchemeParams p;
  p.dt = 1e-4;
  for (auto _ : st) benchmark::DoNotOptimize(step(s0, p));
  st.SetComplexityN(M);
}
BENCHMARK(BM_RadialStep)->RangeMultiplier(2)->Range(256, 4096)->Complexity();

static void BM_Grid2DStep(benchmark::State& st) {
  const double h = 0.2 / static_cast<double>(st.range(0));
  const Grid g = Grid::box(2, -1.5, 1.5, h);
  const Grid2DState s0 = init_from_curve(Curve::circle(1.0), 0.1, g);
  Grid2DParams p;
  p.scheme.dt = 0.5 * h * h;
  for (auto _ : st) benchmark::DoNotOptimize(step(s0, p));
}
// cells across the band
BENCHMARK(BM_Grid2DStep)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

static void BM_Redistance(benchmark::State& st) {
  const double h = 3.0 / static_cast<double>(st.range(0));
  const Grid g = Grid::box(2, -1.5, 1.5, h);
  std::vector<double> phi(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vec x = g.position(i);
    phi[i] = 2.0 * (std::hypot(1.2 * x[0], x[1]) - 1.0);  // not a distance
  }
  for (auto _ : st) benchmark::DoNotOptimize(redistance(g, phi, 0.4, 4.0 * h));
}
BENCHMARK(BM_Redistance)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_Holder1D(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  std::vector<double> x(n), f(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = static_cast<double>(i) / static_cast<double>(n);
    f[i] = std::sqrt(std::abs(x[i] - 0.3)) + std::sin(9.0 * x[i]);
  }
  for (auto _ : st) benchmark::DoNotOptimize(holder_seminorm_1d(x, f, 0.5));
  st.SetComplexityN(static_cast<long>(n));
}
BENCHMARK(BM_Holder1D)->RangeMultiplier(4)->Range(64, 4096)->Complexity();
BENCHMARK_MAIN();
