#include <benchmark/benchmark.h>

#include <cmath>

#include <calr/calr.hpp>

using namespace calr;

namespace {

LayeredConfig shell(int k0, double eta) {
  LayeredConfig c;
  const double e = -1.0 - 1.0 / k0;
  c.eps_c = e * e;
  c.eps_s = e;
  c.eta = eta;
  return c;
}

void BM_ClosedForm(benchmark::State& state) {
  const LayeredConfig c = shell(8, 1e-3);
  const int k = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(solve_mode_closed_form(c, k));
}
BENCHMARK(BM_ClosedForm)->Arg(1)->Arg(8)->Arg(64);

void BM_General4x4(benchmark::State& state) {
  const LayeredConfig c = shell(8, 1e-3);
  const int k = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(solve_mode_general(c, k));
}
BENCHMARK(BM_General4x4)->Arg(1)->Arg(8)->Arg(64);

void BM_DissipatedEnergy(benchmark::State& state) {
  const auto src = SourceSpectrum::zonal_geometric(SourceKind::Multipole, 2.5, 2.5, static_cast<int>(state.range(0)));
  const LayeredConfig c = shell(8, 1e-3);
  for (auto _ : state) benchmark::DoNotOptimize(dissipated_energy(c, src));
}
BENCHMARK(BM_DissipatedEnergy)->Arg(16)->Arg(64)->Arg(256);

void BM_AdaptiveSweep(benchmark::State& state) {
  SweepTemplate t;
  t.materials = MaterialKind::PlasmonicShell;
  const auto src = SourceSpectrum::zonal_geometric(SourceKind::Multipole, 2.5, 2.5, 64);
  std::vector<double> etas;
  for (int j = 5; j <= 20; ++j) etas.push_back(std::pow(0.5, j - 0.5));
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(eta_sweep(t, src, etas, Coupling::adaptive(KRule::ShellRule), threads));
  }
}
BENCHMARK(BM_AdaptiveSweep)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_FieldSample(benchmark::State& state) {
  const auto src = SourceSpectrum::zonal_geometric(SourceKind::Multipole, 2.5, 2.5, 32);
  const FieldEvaluator f(shell(8, 1e-3), src);
  for (auto _ : state) benchmark::DoNotOptimize(f.sample({1.5, 0.7, 0.2}));
}
BENCHMARK(BM_FieldSample);

}  // namespace

BENCHMARK_MAIN();
