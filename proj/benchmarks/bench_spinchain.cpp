#include <benchmark/benchmark.h>

#include "spinchain/encodings.hpp"
#include "spinchain/fidelity.hpp"
#include "spinchain/optimizer.hpp"
#include "spinchain/propagator.hpp"

using namespace spinchain;

static void BM_AmplitudeRow(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ChainSpec chain = make_chain(n, 1.0, 0.0);
  double t = 0.5 * n;
  for (auto _ : state) {
    auto row = amplitude_row(chain, 1, t);
    benchmark::DoNotOptimize(row.data());
    t += 1e-3;  // defeat any caching by time
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_AmplitudeRow)->RangeMultiplier(4)->Range(64, 16384)->Complexity();

static void BM_FidelityDirectPsi11(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ChainSpec chain = make_chain(n, 1.0, 0.0);
  const EncodingState psi = make_psi_k(chain, 11);
  double t = 0.5 * n;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fidelity_direct(chain, psi, t).fidelity);
    t += 1e-3;
  }
}
BENCHMARK(BM_FidelityDirectPsi11)->Arg(1000)->Arg(10000);

static void BM_PsiObjective(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ChainSpec chain = make_chain(n, 1.0, 0.0);
  auto objective = psi_fidelity_objective(chain, 11);
  double t = 0.5 * n;
  for (auto _ : state) {
    benchmark::DoNotOptimize(objective(t));
    t += 1e-3;
  }
}
BENCHMARK(BM_PsiObjective)->Arg(1000)->Arg(10000);

static void BM_TransferObjective(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ChainSpec chain = make_chain(n, 1.0, 0.0);
  auto objective = transfer_fidelity_objective(chain, 9);
  double t = 0.5 * n;
  for (auto _ : state) {
    benchmark::DoNotOptimize(objective(t));
    t += 1e-3;
  }
}
BENCHMARK(BM_TransferObjective)->Arg(500)->Arg(3000);

static void BM_DenseOracle(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ChainSpec chain = make_chain(n, 1.0, 0.0);
  const EncodingState psi = make_psi_k(chain, 2);
  double t = 0.5 * n;
  for (auto _ : state) {
    benchmark::DoNotOptimize(dense_oracle(chain, psi, t).site_amplitudes[0]);
    t += 1e-3;
  }
}
BENCHMARK(BM_DenseOracle)->Arg(64)->Arg(256);

static void BM_XiAverage(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ChainSpec chain = make_chain(n, 1.0, 0.0);
  const FieldDecomposition decomp = field_decomposition(chain, 3, 0.5 * n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        fidelity_xi_avg_from(decomp, Variant::PrintedEq8));
  }
}
BENCHMARK(BM_XiAverage)->Arg(1000)->Arg(10000);

BENCHMARK_MAIN();
