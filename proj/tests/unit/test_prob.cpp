#include <gtest/gtest.h>

#include <cmath>

#include "gwht/errors.hpp"
#include "gwht/prob.hpp"
#include "gwht/random.hpp"

using namespace gwht;

namespace {

JointPmf bin2(const std::string& a, const std::string& b, std::vector<double> w) {
  return JointPmf({{a, 2}, {b, 2}}, std::move(w));
}

JointPmf random_joint(Rng& rng, std::vector<Alphabet> axes, double zero_prob = 0.0) {
  std::size_t n = 1;
  for (const auto& a : axes) n *= a.size;
  std::vector<double> w(n);
  for (auto& v : w) v = rng.uniform01() < zero_prob ? 0.0 : -std::log(1.0 - rng.uniform01());
  if (std::all_of(w.begin(), w.end(), [](double v) { return v == 0.0; })) w[0] = 1.0;
  return JointPmf::normalized(std::move(axes), std::move(w));
}

}  // namespace

TEST(Prob, ConstructionRejectsBadTables) {
  EXPECT_THROW(make_pmf("X", {0.5, 0.4}), ArgumentError);
  EXPECT_THROW(make_pmf("X", {1.5, -0.5}), ArgumentError);
  EXPECT_THROW(JointPmf({{"X", 2}}, {0.25, 0.25, 0.5}), ArgumentError);
  EXPECT_THROW(JointPmf({{"X", 2}, {"X", 2}}, {0.25, 0.25, 0.25, 0.25}), ArgumentError);
  EXPECT_NO_THROW(make_pmf("X", {0.5, 0.5 + 5e-13}));
  EXPECT_THROW(make_pmf("X", {0.5, 0.5 + 5e-12}), ArgumentError);
}

TEST(Prob, EntropyExamples) {
  EXPECT_NEAR(entropy(JointPmf::uniform({{"X", 2}}), {0}), 1.0, 1e-15);
  EXPECT_EQ(entropy(JointPmf::point_mass({{"X", 3}}, {1}), {0}), 0.0);
  EXPECT_NEAR(entropy(make_pmf("X", {0.25, 0.75}), {0}), 0.8112781244591328, 1e-12);
}

TEST(Prob, EntropyOverlapIsError) {
  auto p = JointPmf::uniform({{"X", 2}, {"Y", 2}});
  EXPECT_THROW(entropy(p, {0}, {0}), ArgumentError);
  EXPECT_THROW(mutual_information(p, {0}, {0, 1}), ArgumentError);
}

TEST(Prob, MutualInformationExamples) {
  EXPECT_NEAR(mutual_information(JointPmf::uniform({{"X", 2}, {"Y", 2}}), {0}, {1}), 0.0, 1e-15);
  auto same = bin2("X", "Y", {0.5, 0.0, 0.0, 0.5});
  EXPECT_NEAR(mutual_information(same, {0}, {1}), 1.0, 1e-15);
  auto bsc = bin2("X", "Y", {0.45, 0.05, 0.05, 0.45});
  EXPECT_NEAR(mutual_information(bsc, {0}, {1}), 0.5310044064107188, 1e-12);
}

TEST(Prob, KlExamples) {
  auto p = make_pmf("X", {0.3, 0.7});
  EXPECT_EQ(kl_divergence(p, p), 0.0);
  EXPECT_NEAR(kl_divergence(make_pmf("X", {1, 0}), make_pmf("X", {0.5, 0.5})), 1.0, 1e-15);
  EXPECT_TRUE(std::isinf(kl_divergence(make_pmf("X", {0.5, 0.5}), make_pmf("X", {1, 0}))));
  EXPECT_THROW(kl_divergence(p, make_pmf("Y", {0.3, 0.7})), ArgumentError);
}

TEST(Prob, TvExamples) {
  auto p = make_pmf("X", {0.5, 0.5});
  EXPECT_EQ(tv_distance(p, p), 0.0);
  EXPECT_EQ(tv_distance(make_pmf("X", {1, 0}), make_pmf("X", {0, 1})), 1.0);
  EXPECT_NEAR(tv_distance(p, make_pmf("X", {0.25, 0.75})), 0.25, 1e-15);
}

TEST(Prob, MarginalizeExamples) {
  auto px = make_pmf("X", {0.2, 0.8});
  auto py = make_pmf("Y", {0.6, 0.4});
  auto prod = product(px, py);
  auto m = marginalize(prod, AxisSet{0});
  EXPECT_NEAR(m[0], 0.2, 1e-15);
  EXPECT_NEAR(m[1], 0.8, 1e-15);
  auto diag = bin2("A", "B", {0.5, 0, 0, 0.5});
  EXPECT_EQ(marginalize(diag, AxisSet{0}).weights(), (std::vector<double>{0.5, 0.5}));
  EXPECT_EQ(marginalize(prod, AxisSet{0, 1}).weights(), prod.weights());
  EXPECT_THROW(marginalize(prod, AxisSet{}), ArgumentError);
}

TEST(Prob, MarginalizeReordersAxes) {
  auto p = bin2("A", "B", {0.1, 0.2, 0.3, 0.4});
  auto r = marginalize(p, AxisSet{1, 0});
  EXPECT_EQ(r.axes()[0].label, "B");
  EXPECT_NEAR(r.at({1, 0}), 0.2, 1e-15);
  EXPECT_NEAR(r.at({0, 1}), 0.3, 1e-15);
}

TEST(Prob, ComposeExamples) {
  auto px = JointPmf::uniform({{"X", 2}});
  CondPmf id({{"X", 2}}, {{"Y", 2}}, {1, 0, 0, 1});
  EXPECT_EQ(compose(px, id).weights(), (std::vector<double>{0.5, 0, 0, 0.5}));
  CondPmf constant({{"X", 2}}, {{"Y", 3}}, {0, 1, 0, 0, 1, 0});
  auto c = compose(px, constant);
  EXPECT_NEAR(c.at({0, 1}), 0.5, 1e-15);
  EXPECT_NEAR(c.at({1, 1}), 0.5, 1e-15);
  CondPmf bsc({{"X", 2}}, {{"Y", 2}}, {0.9, 0.1, 0.1, 0.9});
  auto j = compose(px, bsc);
  std::vector<double> want{0.45, 0.05, 0.05, 0.45};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(j[i], want[i], 1e-15);
  CondPmf wrong({{"W", 2}}, {{"Y", 2}}, {1, 0, 0, 1});
  EXPECT_THROW(compose(px, wrong), ArgumentError);
}

TEST(Prob, ConditionalRoundTrip) {
  Rng rng(3);
  auto p = random_joint(rng, {{"A", 2}, {"B", 3}, {"C", 2}});
  auto c = conditional(p, {0, 2}, {1});
  auto back = compose(marginalize(p, AxisSet{0, 2}), c);
  auto reord = marginalize(back, std::vector<std::string>{"A", "B", "C"});
  for (std::size_t i = 0; i < p.size(); ++i) EXPECT_NEAR(reord[i], p[i], 1e-14);
}

TEST(Prob, ContinuityBoundExamples) {
  EXPECT_LT(entropy_continuity_bound(1e-12, 2, false), 1e-9);
  EXPECT_NEAR(entropy_continuity_bound(0.125, 2, false), 0.75, 1e-15);
  EXPECT_NEAR(entropy_continuity_bound(1.0 / (2.0 * std::exp(1.0)), 4, true), 2.2465432, 1e-6);
  EXPECT_THROW(entropy_continuity_bound(0.3, 2, false), ArgumentError);
  EXPECT_THROW(entropy_continuity_bound(0.2, 2, true), ArgumentError);
  EXPECT_THROW(entropy_continuity_bound(0.0, 2, false), ArgumentError);
}

TEST(ProbProperty, MutualInformationNonNegativeAndSymmetric) {
  Rng rng(11);
  for (int k = 0; k < 300; ++k) {
    auto p = random_joint(rng, {{"A", 2}, {"B", 3}, {"C", 2}}, 0.2);
    double iab = mutual_information(p, {0}, {1}, {2});
    double iba = mutual_information(p, {1}, {0}, {2});
    EXPECT_GE(iab, -1e-10);
    EXPECT_NEAR(iab, iba, 1e-10);
  }
}

TEST(ProbProperty, ZeroDivergenceIffZeroTv) {
  Rng rng(12);
  for (int k = 0; k < 300; ++k) {
    auto p = random_joint(rng, {{"A", 3}}, 0.2);
    auto q = k % 3 == 0 ? p : random_joint(rng, {{"A", 3}}, 0.2);
    EXPECT_EQ(kl_divergence(p, q) == 0.0, tv_distance(p, q) == 0.0);
  }
}

TEST(ProbProperty, NormalizationOfDerivedTables) {
  Rng rng(13);
  for (int k = 0; k < 100; ++k) {
    auto p = random_joint(rng, {{"A", 3}, {"B", 4}, {"C", 2}});
    for (const AxisSet& keep : {AxisSet{0}, AxisSet{2, 1}, AxisSet{1}}) {
      auto m = marginalize(p, keep);
      double s = 0.0;
      for (double v : m.weights()) s += v;
      EXPECT_NEAR(s, 1.0, 1e-12);
    }
  }
}

TEST(ProbProperty, EventProbabilityTransfer) {
  Rng rng(14);
  for (int k = 0; k < 1000; ++k) {
    auto p = random_joint(rng, {{"A", 3}, {"B", 2}}, 0.2);
    auto q = random_joint(rng, {{"A", 3}, {"B", 2}}, 0.2);
    double tv = tv_distance(p, q), pa = 0, qa = 0;
    for (std::size_t c = 0; c < p.size(); ++c)
      if (rng.below(2)) pa += p[c], qa += q[c];
    EXPECT_LE(pa, qa + 2 * tv + 1e-12);
  }
}

TEST(ProbProperty, SharedChannelPreservesTv) {
  Rng rng(15);
  for (int k = 0; k < 1000; ++k) {
    auto p = random_joint(rng, {{"X", 3}}, 0.1);
    auto q = random_joint(rng, {{"X", 3}}, 0.1);
    auto rows = random_joint(rng, {{"X", 3}, {"Y", 4}});
    auto c = conditional(rows, {0}, {1});
    EXPECT_NEAR(tv_distance(compose(p, c), compose(q, c)), tv_distance(p, q), 1e-12);
  }
}

TEST(ProbProperty, ConditionalEntropyContinuity) {
  Rng rng(16);
  const double cap = 1.0 / (2.0 * std::exp(1.0));
  int checked = 0;
  for (int k = 0; k < 1000; ++k) {
    auto p = random_joint(rng, {{"X", 3}, {"Y", 4}}, 0.1);
    auto r = random_joint(rng, {{"X", 3}, {"Y", 4}}, 0.1);
    double lam = 0.5 * rng.uniform01();
    std::vector<double> w(p.size());
    for (std::size_t c = 0; c < w.size(); ++c) w[c] = (1 - lam) * p[c] + lam * r[c];
    auto q = JointPmf::normalized(p.axes(), w);
    double theta = tv_distance(p, q);
    if (!(theta > 0.0) || theta > cap) continue;
    ++checked;
    double gap = std::abs(entropy(p, {1}, {0}) - entropy(q, {1}, {0}));
    EXPECT_LE(gap, entropy_continuity_bound(theta, 4, true) + 1e-12);
    double ugap = std::abs(entropy(p, {1}) - entropy(q, {1}));
    if (theta <= 0.25) EXPECT_LE(ugap, entropy_continuity_bound(theta, 4, false) + 1e-12);
  }
  EXPECT_GT(checked, 500);
}
