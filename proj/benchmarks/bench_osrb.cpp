#include <benchmark/benchmark.h>

#include "gwht/osrb.hpp"

using namespace gwht;

namespace {

void BM_OsrbTvPerBinning(benchmark::State& st) {
  OsrbSource src{make_pmf("X", {0.5, 0.5}), CondPmf({{"X", 2}}, {{"Y1", 2}}, {0.9, 0.1, 0.1, 0.9})};
  BinningSpec spec{{0.25}, static_cast<std::size_t>(st.range(0))};
  std::uint64_t seed = 0;
  for (auto _ : st) benchmark::DoNotOptimize(empirical_osrb_tv(spec, src, 1, ++seed).mean_tv);
}
BENCHMARK(BM_OsrbTvPerBinning)->Arg(4)->Arg(8)->Arg(12)->Unit(benchmark::kMicrosecond);

void BM_Zeta(benchmark::State& st) {
  CondPmf chan({{"X", 2}}, {{"Y1", 2}, {"Y2", 2}}, {0.72, 0.18, 0.08, 0.02, 0.02, 0.08, 0.18, 0.72});
  BinningSpec spec{{0.3, 0.3}, 100};
  auto px = make_pmf("X", {0.5, 0.5});
  for (auto _ : st) benchmark::DoNotOptimize(zeta_exponent(spec, px, chan).value);
}
BENCHMARK(BM_Zeta)->Unit(benchmark::kMillisecond);

}  // namespace
