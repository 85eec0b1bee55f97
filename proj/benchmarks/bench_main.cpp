#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "swaptest/analytics.hpp"
#include "swaptest/cqed.hpp"
#include "swaptest/gatesim.hpp"
#include "swaptest/open_protocol.hpp"
#include "swaptest/toymodel.hpp"

using namespace swaptest;

namespace {

std::vector<double> phases(int count) {
  std::vector<double> g(count);
  for (int i = 0; i < count; ++i) g[i] = std::numbers::pi * i / (count - 1);
  return g;
}

void BM_AnalyticCfi(benchmark::State& state) {
  const auto plan = ProbePlan::coherent(Complex{1.5, 0.2}, Complex{-0.7, 0.0});
  double phi = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(analytics::cfi(plan, {0.01, 0.02}, phi));
    phi += 1e-3;
  }
}
BENCHMARK(BM_AnalyticCfi);

void BM_GatesimNoonSweep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto phis = phases(101);
  for (auto _ : state) {
    const gatesim::Protocol p(ProbePlan::noon(n), {}, Branch::Antisymmetric);
    for (double phi : phis) benchmark::DoNotOptimize(p.at(phi).delta);
  }
}
BENCHMARK(BM_GatesimNoonSweep)->Arg(2)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_GatesimCoherentSweep(benchmark::State& state) {
  const double a = static_cast<double>(state.range(0)) / 2;
  const auto phis = phases(101);
  for (auto _ : state) {
    const gatesim::Protocol p(ProbePlan::coherent(a, 0.0), {}, Branch::Antisymmetric);
    for (double phi : phis) benchmark::DoNotOptimize(p.at(phi).delta);
  }
}
BENCHMARK(BM_GatesimCoherentSweep)->Arg(2)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_ToySweep(benchmark::State& state) {
  const auto plan = ProbePlan::noon(static_cast<int>(state.range(0)), 0, GateKind::ControlledBeamSplitter);
  const auto params = toy::ToyParams::balanced(0.6, 1.306, 0.025, 0.025);
  const auto phis = phases(61);
  for (auto _ : state) benchmark::DoNotOptimize(toy::toy_protocol_sweep(plan, params, phis).first_minus);
}
BENCHMARK(BM_ToySweep)->Arg(2)->Arg(6)->Unit(benchmark::kMillisecond);

// One right-hand-side evaluation of the Kerr-cat CPBS segment on the NOON
// subspace; the device sweeps are dominated by this.
void BM_CqedRhs(benchmark::State& state) {
  const auto fields = open::prepare_fields(ProbePlan::noon(static_cast<int>(state.range(0)), 0,
                                                           GateKind::ControlledBeamSplitter));
  const auto model = cqed::cqed_protocol_model(fields, cqed::CqedParams::table_one());
  const auto& g = *model.before_measurement.back().generator;
  const auto n = static_cast<Eigen::Index>(g.dim());
  Matrix rho = Matrix::Identity(n, n) / double(n), out(n, n);
  for (auto _ : state) {
    g.apply(rho, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.counters["dim"] = static_cast<double>(n);
  state.counters["nnz"] = static_cast<double>(g.nonzeros());
}
BENCHMARK(BM_CqedRhs)->Arg(2)->Arg(4)->Arg(6)->Unit(benchmark::kMicrosecond);

}  // namespace
BENCHMARK_MAIN();
