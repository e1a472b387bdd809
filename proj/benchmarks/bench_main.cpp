#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "manet/coding.hpp"
#include "manet/geometry.hpp"
#include "manet/grid.hpp"
#include "manet/relay.hpp"
#include "manet/scheme_fast.hpp"
#include "manet/scheme_slow.hpp"

using namespace manet;

namespace {

void BM_ReshuffleAndRebuild(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const int side = round_side_count(std::sqrt(static_cast<double>(n) / 16.0), true);
  Rng rng(1);
  std::vector<Position> pos(n);
  CellGrid grid(side);
  for (auto _ : state) {
    reshuffle(pos, rng);
    grid.rebuild(pos);
    benchmark::DoNotOptimize(grid.occupancy(0));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_ReshuffleAndRebuild)->Arg(1 << 14)->Arg(1 << 17);

void BM_LtDecode(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const Codec codec(CodingMode::lt, 1.0 / 6.0, 1.0, 3);
  Rng rng(2);
  const SourceBlock block{0, 0, k};
  const auto packets = codec.encode(block, 2 * k, rng);
  for (auto _ : state) benchmark::DoNotOptimize(codec.decode(block, packets).success);
}
BENCHMARK(BM_LtDecode)->Arg(16)->Arg(256)->Arg(4096);

template <typename SchemeT>
void super_slot(benchmark::State& state, SimConfig cfg) {
  SchemeT scheme(cfg);
  RunStreams streams(cfg.seed);
  std::uint64_t g = 0;
  for (auto _ : state) benchmark::DoNotOptimize(scheme.run_super_slot(g++, streams));
}

void BM_FastSuperSlot(benchmark::State& state) {
  SimConfig cfg;
  cfg.scheme = Scheme::fast;
  cfg.n = state.range(0);
  cfg.D = static_cast<std::int64_t>(std::ceil(std::sqrt(static_cast<double>(cfg.n))));
  super_slot<fast::FastScheme>(state, cfg);
}
BENCHMARK(BM_FastSuperSlot)->Arg(4096)->Arg(16384)->Unit(benchmark::kMillisecond);

void BM_SlowSuperSlot(benchmark::State& state) {
  SimConfig cfg;
  cfg.scheme = Scheme::slow;
  cfg.n = state.range(0);
  cfg.D = static_cast<std::int64_t>(std::ceil(std::pow(static_cast<double>(cfg.n), 0.25) - 1e-9));
  super_slot<slow::SlowScheme>(state, cfg);
}
BENCHMARK(BM_SlowSuperSlot)->Arg(10000)->Unit(benchmark::kMillisecond)->Iterations(2);

}  // namespace

BENCHMARK_MAIN();
