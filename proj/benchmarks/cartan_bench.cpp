#include <benchmark/benchmark.h>

#include "cartan/curvature_lab.hpp"
#include "cartan/driver.hpp"

namespace {

const cartan::CotangentPoint kPoint{{0.3, 1.2}, {0.7, -0.4}};

void BM_JetMultiply(benchmark::State& state) {
  const auto env = cartan::seed(kPoint, static_cast<int>(state.range(0)));
  const cartan::Jet a = cartan::sin(env.x[0]) + env.p[1];
  const cartan::Jet b = cartan::exp(env.p[0] * env.x[1]);
  for (auto _ : state) benchmark::DoNotOptimize(a * b);
}
BENCHMARK(BM_JetMultiply)->DenseRange(2, 6);

void BM_CartanJets(benchmark::State& state) {
  const auto k = cartan::parse("sqrt(p1^2+p2^2)+0.3*p1", 2);
  for (auto _ : state) benchmark::DoNotOptimize(cartan::CartanJets::build(k, kPoint, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_CartanJets)->DenseRange(4, 6);

void BM_Curvature(benchmark::State& state) {
  const auto k = cartan::parse("sqrt(x2^2*(p1^2+p2^2))", 2);
  const auto params = cartan::LiftParams::make_linked(1, 1, -1);
  for (auto _ : state) benchmark::DoNotOptimize(cartan::curvature(k, kPoint, params));
}
BENCHMARK(BM_Curvature);

void BM_NablaCurvature(benchmark::State& state) {
  const auto k = cartan::parse("sqrt(x2^2*(p1^2+p2^2))", 2);
  const auto params = cartan::LiftParams::make_linked(1, 1, -1);
  for (auto _ : state) benchmark::DoNotOptimize(cartan::nabla_curvature(k, kPoint, params));
}
BENCHMARK(BM_NablaCurvature);

void BM_RunAllSuites(benchmark::State& state) {
  auto cfg = cartan::preset("hyperbolic-half-plane");
  cfg.points = 20;
  cfg.threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(cartan::run(cfg));
}
BENCHMARK(BM_RunAllSuites)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
