// Acceptance checks AC1..AC9. One PASS/FAIL line per criterion; exit status 1
// if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "config.hpp"
#include "grid_oracle.hpp"
#include "gwht/exponents.hpp"
#include "gwht/osrb.hpp"
#include "gwht/parallel.hpp"
#include "gwht/protocol.hpp"
#include "gwht/types.hpp"
#include "instances.hpp"
#include "protocol_fixture.hpp"
#include "runner.hpp"

using namespace gwht;
namespace fs = std::filesystem;

namespace {

const std::string kSource = GWHT_SOURCE_DIR;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

CondPmf bsc(const std::string& out, double e) { return CondPmf({{"X", 2}}, {{out, 2}}, {1 - e, e, e, 1 - e}); }

cli::ExperimentConfig reference_config(const std::string& command) {
  return cli::load_config(kSource + "/configs/reference.json", command);
}

// AC1
Outcome types_identities() {
  Outcome o;
  int bad = 0, checked = 0;
  for (std::size_t k = 2; k <= 4; ++k) {
    for (std::uint32_t n = 1; n <= 12; ++n) {
      auto types = enumerate_ntypes({"X", k}, n);
      BigInt binom = 1;
      for (std::size_t i = 1; i < k; ++i) binom = binom * (n + i) / i;
      if (BigInt(types.size()) != binom || ntype_count(k, n) != binom) ++bad;
      BigInt total = 0;
      for (const auto& t : types) {
        BigInt size = type_class_size(t);
        total += size;
        double nh = n * ntype_entropy(t);
        double ls = std::log2(static_cast<double>(size));
        if (ls > nh + 1e-9 || ls < nh - k * std::log2(n + 1.0) - 1e-9) ++bad;
        ++checked;
      }
      if (total != boost::multiprecision::pow(BigInt(k), n)) ++bad;
    }
  }
  o.pass = bad == 0;
  o.detail = std::to_string(checked) + " types checked, " + std::to_string(bad) + " violations";
  return o;
}

// AC2
Outcome oracle_equivalence() {
  Outcome o;
  Rng rng(0xAC2);
  double worst = 0.0;
  int theta_bad = 0;
  const int instances = 20;
  for (int k = 0; k < instances; ++k) {
    auto raw = testsupport::random_binary(rng);
    auto in = testsupport::to_lib(raw);
    auto rep = theta_star(in.hyp, in.chan, in.rates, 1);
    worst = std::max({worst, std::abs(rep.e0 - oracle::e0(raw)), std::abs(rep.e1 - oracle::e1(raw)),
                      std::abs(rep.e2 - oracle::e2(raw))});
    if (rep.theta_star != std::min({rep.e0, rep.e1, rep.e2})) ++theta_bad;
  }
  o.pass = worst <= 0.02 && theta_bad == 0;
  o.detail = std::to_string(instances) + " instances, max |solver - oracle| = " + fmt("%.2e", worst) +
             " bits, theta* mismatches = " + std::to_string(theta_bad);
  return o;
}

// AC3
Outcome trivial_exponents() {
  Outcome o;
  Rng rng(0xAC3);
  double e0_worst = 0.0, clamp_worst = 0.0;
  for (int k = 0; k < 10; ++k) {
    auto in = testsupport::random_full_binary(rng);
    for (int j = 1; j <= 2; ++j) {
      e0_worst = std::max(e0_worst, std::abs(exponent_E0({in.hyp.p, in.hyp.p}, in.chan, j).value));
      RateVector wide = in.rates;
      for (double& r : wide.Rt) r = 5.0;
      auto e2 = exponent_E2(in.hyp, in.chan, wide, j);
      // With pi_Z = p_Z the only constraint, the divergence minimum is D(p_Z || q_Z).
      const std::vector<std::string> z{labels::Z[j]};
      double pure = kl_divergence(marginalize(in.hyp.p, z), marginalize(in.hyp.q, z));
      clamp_worst = std::max({clamp_worst, std::abs(e2.value - e2.divergence), std::abs(e2.value - pure)});
    }
  }
  o.pass = e0_worst <= 1e-6 && clamp_worst <= 1e-6;
  o.detail = "max |E0(q=p)| = " + fmt("%.2e", e0_worst) + ", max clamp deviation = " + fmt("%.2e", clamp_worst);
  return o;
}

// AC4
Outcome osrb_bound() {
  Outcome o;
  OsrbSource src{make_pmf("X", {0.5, 0.5}), bsc("Y1", 0.1)};
  std::ostringstream d;
  for (std::size_t n : {4, 8, 12}) {
    BinningSpec spec{{0.25}, n};
    auto tv = empirical_osrb_tv(spec, src, 2000, 0xAC4 + n, resolve_workers(0));
    double measured = -std::log2(tv.mean_tv) / static_cast<double>(n);
    // Delta-method standard error of the measured exponent.
    double se = tv.stderr_tv / (static_cast<double>(n) * std::log(2.0) * tv.mean_tv);
    double z = zeta_exponent(spec, src.p_x, src.chan).value;
    bool ok = measured >= z - 3 * se;
    o.pass = o.pass && ok;
    d << "n=" << n << ": " << fmt("%.4f", measured) << " >= " << fmt("%.4f", z) << " - 3*" << fmt("%.4f", se)
      << (ok ? "" : " [violated]") << "; ";
  }
  // Exhaustive case: T = 2, BSC(0.1) and BSC(0.2), n = 2, two bins each, 256 binning pairs.
  CondPmf chan({{"X", 2}}, {{"Y1", 2}, {"Y2", 2}}, {0.72, 0.18, 0.08, 0.02, 0.02, 0.08, 0.18, 0.72});
  OsrbSource two{make_pmf("X", {0.5, 0.5}), chan};
  BinningSpec spec{{0.5, 0.5}, 2};
  const double golden = 0.506525;  // independent brute force, see tests/unit/test_osrb.cpp
  double exact = exhaustive_osrb_tv(spec, two);
  auto mc = empirical_osrb_tv(spec, two, 20000, 0xAC4);
  bool golden_ok = std::abs(exact - golden) <= 1e-9 && std::abs(mc.mean_tv - exact) <= 4 * mc.stderr_tv;
  o.pass = o.pass && golden_ok;
  d << "exhaustive " << fmt("%.6f", exact) << " (golden " << fmt("%.6f", golden) << ", MC " << fmt("%.4f", mc.mean_tv)
    << " +- " << fmt("%.4f", mc.stderr_tv) << ")";
  o.detail = d.str();
  return o;
}

// AC5
Outcome aleph_reduction() {
  Outcome o;
  Rng rng(0xAC5);
  int bad = 0;
  double worst = 0.0;
  for (int k = 0; k < 10; ++k) {
    auto px = testsupport::random_simplex(rng, 2);
    std::size_t n = 4 + rng.below(200);
    BinningSpec spec{{}, n};
    CondPmf chan = bsc("Y1", 0.05 + 0.4 * rng.uniform01());
    if (k % 2) {
      double a = 0.05 + 0.4 * rng.uniform01(), b = 0.05 + 0.4 * rng.uniform01();
      chan = CondPmf({{"X", 2}}, {{"Y1", 2}, {"Y2", 2}},
                     {(1 - a) * (1 - b), (1 - a) * b, a * (1 - b), a * b, a * b, a * (1 - b), (1 - a) * b,
                      (1 - a) * (1 - b)});
      spec.rates = {0.6 * rng.uniform01(), 0.6 * rng.uniform01()};
    } else {
      spec.rates = {0.6 * rng.uniform01()};
    }
    auto z = zeta_exponent(spec, make_pmf("X", px), chan);
    NType trivial{{"Z", 1}, {static_cast<std::uint32_t>(n)}, static_cast<std::uint32_t>(n)};
    auto a = aleph_exponent(spec, trivial, CondPmf({{"Z", 1}}, {{"X", 2}}, px), chan);
    if (a.value != z.value) ++bad;
    worst = std::max(worst, std::abs(a.value - z.value));
  }
  o.pass = bad == 0;
  o.detail = "10 instances, " + std::to_string(bad) + " differ (max |aleph - zeta| = " + fmt("%.1e", worst) + ")";
  return o;
}

// AC6
Outcome protocol_trends() {
  Outcome o;
  auto cfg = reference_config("simulate");
  const auto pts = cfg.points();
  std::vector<ErrorReport> reps;
  SimulationOptions opts;
  opts.workers = resolve_workers(0);
  for (const auto& pt : pts) reps.push_back(estimate_errors(ProtocolModel(cfg.at(pt)), 10000, cfg.protocol.seed, opts));
  bool alpha_ok = true, beta_ok = true;
  std::ostringstream d;
  for (int j = 1; j <= 2; ++j) {
    for (std::size_t k = 1; k < reps.size(); ++k) {
      alpha_ok = alpha_ok && reps[k].alpha[j] < reps[k - 1].alpha[j];
      beta_ok = beta_ok && reps[k].beta[j] < reps[k - 1].beta[j];
    }
    alpha_ok = alpha_ok && reps.back().alpha[j] < 0.5;
    d << "j=" << j << " alpha";
    for (const auto& r : reps) d << " " << fmt("%.4f", r.alpha[j]);
    d << ", beta";
    for (const auto& r : reps) d << " " << fmt("%.4f", r.beta[j]);
    d << "; ";
  }
  const std::vector<std::string> xz{labels::X, labels::Z[1], labels::Z[2]};
  double dqp = kl_divergence(cfg.protocol.alt, marginalize(cfg.protocol.source, xz));
  d << "n =";
  for (const auto& pt : pts) d << " " << pt.n;
  d << ", D(q||p) = " << fmt("%.4f", dqp) << " bits; alpha trend " << (alpha_ok ? "ok" : "FAILED") << ", beta trend "
    << (beta_ok ? "ok" : "FAILED");
  o.pass = alpha_ok && beta_ok;
  o.detail = d.str();
  return o;
}

// AC7
Outcome equivocation_bounds() {
  Outcome o;
  std::ostringstream d;
  auto cfg = reference_config("equivocation");
  ProtocolConfig pc = cfg.protocol;
  pc.n = 4;
  ProtocolModel model(pc);
  Rng rng = Rng::derive(pc.seed, {0xB1175u});
  auto bins = sample_binning(model, rng);
  for (int i = 1; i <= 2; ++i) {
    double h = estimate_equivocation(model, bins, i, EquivocationMode::Exact, 0, pc.seed);
    double lo = privacy_bound(pc.source, pc.chan, i) - 0.15;
    double hi = entropy(pc.source, pc.source.axes_of({labels::S[i]}));
    bool ok = h >= lo && h <= hi + 1e-9;
    o.pass = o.pass && ok;
    d << "i=" << i << ": " << fmt("%.4f", h) << " in [" << fmt("%.4f", lo) << ", " << fmt("%.4f", hi) << "]; ";
  }

  testsupport::BinarySetup s;
  s.n = 4;
  s.ps = 0.5;
  ProtocolModel indep(testsupport::binary_config(s));
  Rng r2(7);
  auto b2 = sample_binning(indep, r2);
  double worst_indep = 0.0;
  for (int i = 1; i <= 2; ++i)
    worst_indep = std::max(worst_indep, std::abs(estimate_equivocation(indep, b2, i, EquivocationMode::Exact, 0, 1) - 1.0));

  s.ps = 0.0;
  s.eps = {0.0, 0.2, 0.2};
  ProtocolModel revealed(testsupport::binary_config(s));
  std::array<std::vector<std::uint32_t>, 3> m, f;
  for (int i = 0; i < 3; ++i) {
    m[i].resize(16);
    f[i].assign(16, 0);
    for (std::uint32_t y = 0; y < 16; ++y) m[i][y] = i == 0 ? y : 0;
  }
  auto singletons = BinningRealization::from_maps(4, {2, 2, 2}, {16, 1, 1}, {1, 1, 1}, m, f);
  double worst_rev = 0.0;
  for (int i = 1; i <= 2; ++i)
    worst_rev = std::max(worst_rev, std::abs(estimate_equivocation(revealed, singletons, i, EquivocationMode::Exact, 0, 1)));
  o.pass = o.pass && worst_indep <= 1e-9 && worst_rev <= 1e-9;
  d << "independent S error " << fmt("%.1e", worst_indep) << ", revealed S error " << fmt("%.1e", worst_rev);
  o.detail = d.str();
  return o;
}

JointPmf random_joint(Rng& rng, std::vector<Alphabet> axes, double zero_prob) {
  std::size_t n = 1;
  for (const auto& a : axes) n *= a.size;
  std::vector<double> w(n);
  for (auto& v : w) v = rng.uniform01() < zero_prob ? 0.0 : -std::log(1.0 - rng.uniform01());
  if (std::all_of(w.begin(), w.end(), [](double v) { return v == 0.0; })) w[0] = 1.0;
  return JointPmf::normalized(std::move(axes), std::move(w));
}

// AC8
Outcome tv_properties() {
  Outcome o;
  Rng rng(0xAC8);
  int transfer = 0, channel = 0, cond = 0, uncond = 0, cond_checked = 0, uncond_checked = 0;
  for (int k = 0; k < 1000; ++k) {
    auto p = random_joint(rng, {{"A", 3}, {"B", 2}}, 0.2);
    auto q = random_joint(rng, {{"A", 3}, {"B", 2}}, 0.2);
    double tv = tv_distance(p, q), pa = 0, qa = 0;
    for (std::size_t c = 0; c < p.size(); ++c)
      if (rng.below(2)) pa += p[c], qa += q[c];
    if (pa > qa + 2 * tv + 1e-12) ++transfer;
  }
  for (int k = 0; k < 1000; ++k) {
    auto p = random_joint(rng, {{"X", 3}}, 0.1);
    auto q = random_joint(rng, {{"X", 3}}, 0.1);
    auto c = conditional(random_joint(rng, {{"X", 3}, {"Y", 4}}, 0.0), {0}, {1});
    if (std::abs(tv_distance(compose(p, c), compose(q, c)) - tv_distance(p, q)) > 1e-12) ++channel;
  }
  const double cap = 1.0 / (2.0 * std::exp(1.0));
  while (cond_checked < 1000 || uncond_checked < 1000) {
    auto p = random_joint(rng, {{"X", 3}, {"Y", 4}}, 0.1);
    auto r = random_joint(rng, {{"X", 3}, {"Y", 4}}, 0.1);
    double lam = 0.5 * rng.uniform01();
    std::vector<double> w(p.size());
    for (std::size_t c = 0; c < w.size(); ++c) w[c] = (1 - lam) * p[c] + lam * r[c];
    auto q = JointPmf::normalized(p.axes(), w);
    double theta = tv_distance(p, q);
    if (!(theta > 0.0)) continue;
    if (theta <= cap && cond_checked < 1000) {
      ++cond_checked;
      if (std::abs(entropy(p, {1}, {0}) - entropy(q, {1}, {0})) > entropy_continuity_bound(theta, 4, true) + 1e-12) ++cond;
    }
    auto py = marginalize(p, AxisSet{1}), qy = marginalize(q, AxisSet{1});
    double ty = tv_distance(py, qy);
    if (ty > 0.0 && ty <= 0.25 && uncond_checked < 1000) {
      ++uncond_checked;
      if (std::abs(entropy(py, {0}) - entropy(qy, {0})) > entropy_continuity_bound(ty, 4, false) + 1e-12) ++uncond;
    }
  }
  o.pass = transfer + channel + cond + uncond == 0;
  o.detail = "violations: TV transfer " + std::to_string(transfer) + ", channel invariance " + std::to_string(channel) +
             ", conditional continuity " + std::to_string(cond) + ", continuity " + std::to_string(uncond) +
             " (1000 instances each)";
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// AC9
Outcome determinism() {
  Outcome o;
  fs::path dir = fs::temp_directory_path() / ("gwht_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  std::ostringstream d;
  const std::string cfg = kSource + "/configs/reference.json";
  for (std::string cmd : {"simulate", "osrb"}) {
    std::vector<std::string> outs;
    int k = 0;
    for (std::size_t workers : {1, 1, 3, 8}) {
      for (std::string ext : {".csv", ".json"}) {
        auto path = dir / (cmd + std::to_string(k) + ext);
        std::ostringstream sink;
        int rc = cli::run({cmd, cfg, path.string(), 2000, std::nullopt, workers}, sink, sink);
        if (rc != 0) o.pass = false;
        outs.push_back(slurp(path));
      }
      ++k;
    }
    bool same = true;
    for (std::size_t i = 2; i < outs.size(); ++i) same = same && outs[i] == outs[i % 2];
    o.pass = o.pass && same && !outs[0].empty();
    d << cmd << ": 4 runs (workers 1,1,3,8) x 2 formats " << (same ? "identical" : "DIFFER") << "; ";
  }
  fs::remove_all(dir);
  o.detail = d.str();
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"AC1", types_identities},  {"AC2", oracle_equivalence}, {"AC3", trivial_exponents},
      {"AC4", osrb_bound},        {"AC5", aleph_reduction},    {"AC6", protocol_trends},
      {"AC7", equivocation_bounds}, {"AC8", tv_properties},    {"AC9", determinism},
  };
  bool all = true;
  for (const auto& [name, fn] : criteria) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %s  %s  [%.1f s]\n", name.c_str(), o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
