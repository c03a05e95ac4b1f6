#include <benchmark/benchmark.h>

#include "gwht/protocol.hpp"

using namespace gwht;

namespace {

double flip(int a, int b, double e) { return a == b ? 1 - e : e; }

ProtocolConfig reference(std::size_t n) {
  std::vector<double> src, alt, w;
  for (int x = 0; x < 2; ++x)
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        alt.push_back(0.5 * flip(x, a, 0.19) * flip(x, b, 0.19));
        for (int c = 0; c < 2; ++c) w.push_back(flip(x, a, 0.1) * flip(x, b, 0.1) * flip(x, c, 0.1));
        for (int s1 = 0; s1 < 2; ++s1)
          for (int s2 = 0; s2 < 2; ++s2)
            src.push_back(0.5 * flip(x, a, 0.1) * flip(x, b, 0.1) * flip(x, s1, 0.25) * flip(x, s2, 0.25));
      }
  ProtocolConfig c;
  c.source = JointPmf({{"X", 2}, {"Z1", 2}, {"Z2", 2}, {"S1", 2}, {"S2", 2}}, src);
  c.alt = JointPmf({{"X", 2}, {"Z1", 2}, {"Z2", 2}}, alt);
  c.chan = CondPmf({{"X", 2}}, {{"Y0", 2}, {"Y1", 2}, {"Y2", 2}}, w);
  c.rates = {{0.5, 0.5, 0.5}, {0.3, 0.3, 0.3}};
  c.n = n;
  c.delta_c = 0.7;
  return c;
}

void BM_SimulateTrials(benchmark::State& st) {
  ProtocolModel model(reference(static_cast<std::size_t>(st.range(0))));
  const std::size_t trials = 200;
  std::uint64_t seed = 0;
  for (auto _ : st) benchmark::DoNotOptimize(estimate_errors(model, trials, ++seed).alpha[1]);
  st.SetItemsProcessed(st.iterations() * 2 * static_cast<std::int64_t>(trials));
}
BENCHMARK(BM_SimulateTrials)->Arg(4)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_ExactEquivocation(benchmark::State& st) {
  ProtocolModel model(reference(static_cast<std::size_t>(st.range(0))));
  Rng rng(3);
  auto bins = sample_binning(model, rng);
  for (auto _ : st) benchmark::DoNotOptimize(estimate_equivocation(model, bins, 1, EquivocationMode::Exact, 0, 1));
}
BENCHMARK(BM_ExactEquivocation)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace
