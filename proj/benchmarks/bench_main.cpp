#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "loopqrng/entropy.hpp"
#include "loopqrng/extractor.hpp"
#include "loopqrng/model.hpp"
#include "loopqrng/rng.hpp"
#include "loopqrng/sequence.hpp"
#include "loopqrng/simulator.hpp"

namespace {

using namespace loopqrng;

const OpticalParams kRef{0.33, 0.41, 0.230, 8};

void BM_SingleClickDistribution(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(single_click_distribution(kRef));
}
BENCHMARK(BM_SingleClickDistribution);

void BM_SimulateStream(benchmark::State& state) {
  SimConfig config;
  config.params = kRef;
  config.n_pulses = static_cast<std::uint64_t>(state.range(0));
  config.seed = 7;
  for (auto _ : state) benchmark::DoNotOptimize(simulate_stream(config));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulateStream)->Arg(100'000)->Arg(1'000'000);

void BM_PostSelectPartition(benchmark::State& state) {
  SimConfig config;
  config.params = kRef;
  config.n_pulses = 1'000'000;
  config.seed = 7;
  const EventStream stream = simulate_stream(config);
  for (auto _ : state) {
    auto selected = post_select(stream.events);
    benchmark::DoNotOptimize(partition(selected));
  }
  state.SetItemsProcessed(state.iterations() * stream.events.size());
}
BENCHMARK(BM_PostSelectPartition);

std::vector<std::uint8_t> biased_bits(std::size_t n) {
  std::vector<std::uint8_t> bits(n);
  for (std::size_t i = 0; i < n; ++i)
    bits[i] = rng::to_unit(rng::at(0xB1A5, i)) < 0.24 ? 1 : 0;
  return bits;
}

void BM_McvEstimate(benchmark::State& state) {
  const auto bits = biased_bits(1'000'000);
  for (auto _ : state) benchmark::DoNotOptimize(mcv_estimate(bits));
  state.SetItemsProcessed(state.iterations() * bits.size());
}
BENCHMARK(BM_McvEstimate);

void BM_MarkovEstimate(benchmark::State& state) {
  const auto bits = biased_bits(1'000'000);
  for (auto _ : state) benchmark::DoNotOptimize(markov_estimate(bits));
  state.SetItemsProcessed(state.iterations() * bits.size());
}
BENCHMARK(BM_MarkovEstimate);

void BM_CompressionEstimate(benchmark::State& state) {
  const auto bits = biased_bits(1'000'000);
  for (auto _ : state) benchmark::DoNotOptimize(compression_estimate(bits));
  state.SetItemsProcessed(state.iterations() * bits.size());
}
BENCHMARK(BM_CompressionEstimate);

void BM_ToeplitzBlock(benchmark::State& state) {
  const ExtractorConfig config{4096, 1e-10, 0.3958, 7};
  const ToeplitzExtractor extractor = ToeplitzExtractor::from_config(config);
  std::vector<std::uint8_t> block(4096);
  for (std::size_t i = 0; i < block.size(); ++i)
    block[i] = static_cast<std::uint8_t>(rng::at(3, i) >> 63);
  for (auto _ : state) benchmark::DoNotOptimize(extractor.extract_block(block));
  state.SetItemsProcessed(state.iterations() * block.size());
}
BENCHMARK(BM_ToeplitzBlock);

}  // namespace

BENCHMARK_MAIN();
