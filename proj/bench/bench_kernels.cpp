// Serial reference loops against the OpenMP kernels on the same inputs.
// Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <random>

#include "recomb/dynamics.hpp"
#include "recomb/entropy.hpp"
#include "recomb/random.hpp"
#include "recomb/rqs.hpp"
#include "recomb/serial.hpp"

namespace {

using namespace recomb;

Distribution sample(const ProductSpace& space) {
  std::mt19937_64 rng(42);
  return random_distribution(space, rng);
}

void BM_Marginal_Serial(benchmark::State& state) {
  const auto space = ProductSpace::binary(static_cast<int>(state.range(0)));
  const auto p = sample(space);
  const auto a = SiteSubset((std::uint64_t{1} << (space.sites() / 2)) - 1);
  for (auto _ : state) benchmark::DoNotOptimize(serial::marginal(p.weights(), space, a));
}

void BM_Marginal_OpenMP(benchmark::State& state) {
  const auto space = ProductSpace::binary(static_cast<int>(state.range(0)));
  const auto p = sample(space);
  const auto a = SiteSubset((std::uint64_t{1} << (space.sites() / 2)) - 1);
  for (auto _ : state) benchmark::DoNotOptimize(p.marginal(a));
}

void BM_Psi_Serial(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto space = ProductSpace::binary(n);
  const auto p = sample(space);
  const auto nu = CrossoverLaw::uniform(n);
  for (auto _ : state) benchmark::DoNotOptimize(serial::psi_step(p.weights(), space, nu));
}

void BM_Psi_OpenMP(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto space = ProductSpace::binary(n);
  const auto p = sample(space);
  const RecombinationOperator op(space, CrossoverLaw::uniform(n));
  std::vector<double> out(space.size());
  for (auto _ : state) {
    op.apply(p.weights(), out);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_EntropyProfile_Serial(benchmark::State& state) {
  const auto space = ProductSpace::binary(static_cast<int>(state.range(0)));
  const auto mu = ProductMeasure::uniform(space);
  const auto f = density_of(sample(space), mu);
  for (auto _ : state) benchmark::DoNotOptimize(serial::entropy_profile(f, mu));
}

void BM_EntropyProfile_OpenMP(benchmark::State& state) {
  const auto space = ProductSpace::binary(static_cast<int>(state.range(0)));
  const auto mu = ProductMeasure::uniform(space);
  const auto f = density_of(sample(space), mu);
  for (auto _ : state) benchmark::DoNotOptimize(entropy_profile(f, mu));
}

void BM_Drift_Serial(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto space = ProductSpace::binary(n);
  auto g = make_recombination_generator(CrossoverLaw::single_site(n), space);
  g.compile();
  const auto p = sample(space);
  for (auto _ : state) benchmark::DoNotOptimize(serial::drift(p.weights(), g));
}

void BM_Drift_OpenMP(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto space = ProductSpace::binary(n);
  auto g = make_recombination_generator(CrossoverLaw::single_site(n), space);
  g.compile();
  const auto p = sample(space);
  for (auto _ : state) benchmark::DoNotOptimize(drift(p.weights(), g));
}

void BM_Production_Serial(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto space = ProductSpace::binary(n);
  auto g = make_recombination_generator(CrossoverLaw::single_site(n), space);
  g.compile();
  const auto mu = ProductMeasure::uniform(space);
  const auto f = density_of(sample(space), mu);
  for (auto _ : state) {
    benchmark::DoNotOptimize(serial::entropy_production(f.values(), f.values(), g, mu.joint()));
  }
}

void BM_Production_OpenMP(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto space = ProductSpace::binary(n);
  auto g = make_recombination_generator(CrossoverLaw::single_site(n), space);
  g.compile();
  const auto mu = ProductMeasure::uniform(space);
  const auto f = density_of(sample(space), mu);
  for (auto _ : state) benchmark::DoNotOptimize(entropy_production(f.values(), f.values(), g, mu.joint()));
}

BENCHMARK(BM_Marginal_Serial)->Arg(12)->Arg(16);
BENCHMARK(BM_Marginal_OpenMP)->Arg(12)->Arg(16);
BENCHMARK(BM_Psi_Serial)->Arg(8)->Arg(10);
BENCHMARK(BM_Psi_OpenMP)->Arg(8)->Arg(10);
BENCHMARK(BM_EntropyProfile_Serial)->Arg(8)->Arg(10);
BENCHMARK(BM_EntropyProfile_OpenMP)->Arg(8)->Arg(10);
BENCHMARK(BM_Drift_Serial)->Arg(5)->Arg(6);
BENCHMARK(BM_Drift_OpenMP)->Arg(5)->Arg(6);
BENCHMARK(BM_Production_Serial)->Arg(5)->Arg(6);
BENCHMARK(BM_Production_OpenMP)->Arg(5)->Arg(6);

}  // namespace

BENCHMARK_MAIN();
