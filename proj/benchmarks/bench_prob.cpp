#include <benchmark/benchmark.h>

#include <cmath>

#include "gwht/prob.hpp"
#include "gwht/random.hpp"
#include "gwht/types.hpp"

using namespace gwht;

namespace {

JointPmf random_joint(Rng& rng, std::vector<Alphabet> axes) {
  std::size_t n = 1;
  for (const auto& a : axes) n *= a.size;
  std::vector<double> w(n);
  for (auto& v : w) v = -std::log(1.0 - rng.uniform01());
  return JointPmf::normalized(std::move(axes), std::move(w));
}

void BM_ConditionalEntropy(benchmark::State& st) {
  Rng rng(1);
  const auto k = static_cast<std::size_t>(st.range(0));
  auto p = random_joint(rng, {{"A", k}, {"B", k}, {"C", k}, {"D", k}});
  for (auto _ : st) benchmark::DoNotOptimize(entropy(p, {1, 2}, {0, 3}));
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(p.size()));
}
BENCHMARK(BM_ConditionalEntropy)->Arg(2)->Arg(4)->Arg(8);

void BM_KlDivergence(benchmark::State& st) {
  Rng rng(2);
  const auto k = static_cast<std::size_t>(st.range(0));
  auto p = random_joint(rng, {{"A", k}, {"B", k}, {"C", k}});
  auto q = random_joint(rng, {{"A", k}, {"B", k}, {"C", k}});
  for (auto _ : st) benchmark::DoNotOptimize(kl_divergence(p, q));
}
BENCHMARK(BM_KlDivergence)->Arg(4)->Arg(16);

void BM_TypeClassSize(benchmark::State& st) {
  auto types = enumerate_ntypes({"X", 4}, static_cast<std::uint32_t>(st.range(0)));
  for (auto _ : st)
    for (const auto& t : types) benchmark::DoNotOptimize(type_class_size(t));
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(types.size()));
}
BENCHMARK(BM_TypeClassSize)->Arg(12)->Arg(48);

}  // namespace
