#include <benchmark/benchmark.h>

#include "gwht/exponents.hpp"

using namespace gwht;

namespace {

double flip(int a, int b, double e) { return a == b ? 1 - e : e; }

struct Instance {
  HypothesisPair hyp;
  CondPmf chan;
  RateVector rates{{0.5, 0.5, 0.5}, {0.3, 0.3, 0.3}};
};

Instance binary_instance() {
  std::vector<double> p, q, w;
  for (int x = 0; x < 2; ++x)
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        p.push_back(0.5 * flip(x, a, 0.1) * flip(x, b, 0.1));
        q.push_back(0.5 * flip(x, a, 0.19) * flip(x, b, 0.19));
        for (int c = 0; c < 2; ++c) w.push_back(flip(x, a, 0.1) * flip(x, b, 0.1) * flip(x, c, 0.1));
      }
  std::vector<Alphabet> axes{{"X", 2}, {"Z1", 2}, {"Z2", 2}};
  return {{JointPmf(axes, p), JointPmf(axes, q)}, CondPmf({{"X", 2}}, {{"Y0", 2}, {"Y1", 2}, {"Y2", 2}}, w)};
}

void BM_E0(benchmark::State& st) {
  auto in = binary_instance();
  for (auto _ : st) benchmark::DoNotOptimize(exponent_E0(in.hyp, in.chan, 1).value);
}
BENCHMARK(BM_E0)->Unit(benchmark::kMillisecond);

void BM_E1(benchmark::State& st) {
  auto in = binary_instance();
  for (auto _ : st) benchmark::DoNotOptimize(exponent_E1(in.hyp, in.chan, in.rates, 1).value);
}
BENCHMARK(BM_E1)->Unit(benchmark::kMillisecond);

void BM_E2(benchmark::State& st) {
  auto in = binary_instance();
  ExponentOptions opts;
  opts.solver.starts = static_cast<std::size_t>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(exponent_E2(in.hyp, in.chan, in.rates, 1, opts).value);
}
BENCHMARK(BM_E2)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);

}  // namespace
