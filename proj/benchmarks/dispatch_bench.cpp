// Microbenchmarks for the per-arrival dispatch decision and for whole-trial
// throughput.  Dispatch cost is the quantity that scales with arrival count,
// so it is worth watching when policies grow extra bookkeeping.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "cardsim/distribution.hpp"
#include "cardsim/policy.hpp"
#include "cardsim/policy_params.hpp"
#include "cardsim/rng.hpp"
#include "cardsim/simulator.hpp"

namespace {

using namespace cardsim;

constexpr std::size_t kPoolSize = 1024;
constexpr std::uint64_t kSeed = 0x5eedbeefcafef00dULL;

// Fixed pool of work vectors and sizes so every policy sees identical
// inputs and the RNG cost of generating them stays out of the loop.
struct InputPool {
  std::vector<WorkVector> work;
  std::vector<double> size;

  InputPool(int n, double work_scale) {
    RandomStream rng(kSeed);
    auto model = JobSizeModel::weibull_from_mean_cv(1.0, 10.0);
    work.resize(kPoolSize, WorkVector(n));
    size.resize(kPoolSize);
    for (std::size_t i = 0; i < kPoolSize; ++i) {
      for (int s = 0; s < n; ++s) work[i][s] = work_scale * rng.next01();
      size[i] = model.sample(rng);
    }
  }
};

void run_dispatch(benchmark::State& state, const PolicyConfig& policy) {
  const int n = policy_n(policy);
  InputPool pool(n, 20.0);
  PolicyState ps;
  RandomStream rng(kSeed + 1);
  std::size_t i = 0;
  for (auto _ : state) {
    int server = dispatch(policy, ps, pool.size[i], pool.work[i], rng);
    benchmark::DoNotOptimize(server);
    i = (i + 1) & (kPoolSize - 1);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()));
}

PolicyConfig card(int n, bool flexible) {
  return CardConfig::create(n, 1.0, 5.0, 50.0, flexible);
}

PolicyConfig dice(int n) {
  auto model = JobSizeModel::weibull_from_mean_cv(1.0, 10.0);
  return dice_thresholds(n, 0.1, model, std::nullopt);
}

PolicyConfig multiband(int n) {
  auto model = JobSizeModel::weibull_from_mean_cv(1.0, 10.0);
  return multiband_config(n, 0.9, 0.1, model, true);
}

void BM_DispatchLwl2(benchmark::State& s) { run_dispatch(s, LwlConfig::create(2)); }
void BM_DispatchLwl10(benchmark::State& s) { run_dispatch(s, LwlConfig::create(10)); }
void BM_DispatchSita2(benchmark::State& s) {
  run_dispatch(s, sita_equal_load(2, JobSizeModel::weibull_from_mean_cv(1.0, 10.0)));
}
void BM_DispatchCardRigid2(benchmark::State& s) { run_dispatch(s, card(2, false)); }
void BM_DispatchCardFlexible2(benchmark::State& s) { run_dispatch(s, card(2, true)); }
void BM_DispatchCardFlexible10(benchmark::State& s) { run_dispatch(s, card(10, true)); }
void BM_DispatchMultiband10(benchmark::State& s) { run_dispatch(s, multiband(10)); }
void BM_DispatchDice2(benchmark::State& s) { run_dispatch(s, dice(2)); }
void BM_DispatchDice10(benchmark::State& s) { run_dispatch(s, dice(10)); }

BENCHMARK(BM_DispatchLwl2);
BENCHMARK(BM_DispatchLwl10);
BENCHMARK(BM_DispatchSita2);
BENCHMARK(BM_DispatchCardRigid2);
BENCHMARK(BM_DispatchCardFlexible2);
BENCHMARK(BM_DispatchCardFlexible10);
BENCHMARK(BM_DispatchMultiband10);
BENCHMARK(BM_DispatchDice2);
BENCHMARK(BM_DispatchDice10);

// End-to-end trial throughput, reported as arrivals per second.
void run_whole_trial(benchmark::State& state, const PolicyConfig& policy) {
  SimConfig cfg;
  cfg.policy = policy;
  cfg.model = JobSizeModel::exponential(1.0);
  cfg.lambda = 0.9;
  cfg.arrivals = 100000;
  for (auto _ : state) {
    auto streams = make_trial_streams(kSeed, 0.9, 0);
    TrialResult r = run_trial(cfg, streams);
    benchmark::DoNotOptimize(r.mean_response);
  }
  state.SetItemsProcessed(
      static_cast<std::int64_t>(state.iterations() * cfg.arrivals));
}

void BM_TrialLwl2(benchmark::State& s) { run_whole_trial(s, LwlConfig::create(2)); }
void BM_TrialCardFlexible2(benchmark::State& s) { run_whole_trial(s, card(2, true)); }
void BM_TrialCardFlexible10(benchmark::State& s) { run_whole_trial(s, card(10, true)); }

BENCHMARK(BM_TrialLwl2);
BENCHMARK(BM_TrialCardFlexible2);
BENCHMARK(BM_TrialCardFlexible10);

}  // namespace

BENCHMARK_MAIN();
