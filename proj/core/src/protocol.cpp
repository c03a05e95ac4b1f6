#include "gwht/protocol.hpp"

#include <algorithm>
#include <cmath>

#include "gwht/errors.hpp"
#include "gwht/osrb.hpp"
#include "gwht/parallel.hpp"

namespace gwht {

namespace {

std::vector<std::string> xz_labels() { return {labels::X, labels::Z[1], labels::Z[2]}; }

std::vector<std::string> xzs_labels() {
  return {labels::X, labels::Z[1], labels::Z[2], labels::S[1], labels::S[2]};
}

std::size_t axis_size(const JointPmf& p, const std::string& l) { return p.axes()[p.axis(l)].size; }

// Per-position probability of the y-tuple given x.
double seq_weight(const std::vector<double>& w, std::size_t ny, const std::vector<std::uint32_t>& x,
                  std::size_t y_index) {
  double p = 1.0;
  for (std::size_t t = x.size(); t-- > 0;) {
    p *= w[x[t] * ny + y_index % ny];
    if (p == 0.0) return 0.0;
    y_index /= ny;
  }
  return p;
}

Sequence make_seq(const std::string& label, std::size_t size, std::vector<std::uint32_t> s) {
  return Sequence{Alphabet{label, size}, std::move(s)};
}

void fill_transcript(const ProtocolModel& model, const BinningRealization& bins, Transcript& tr) {
  const std::size_t n = model.n();
  std::array<std::vector<std::uint32_t>, 3> ys;
  for (int i = 0; i < 3; ++i) {
    ys[i] = sequence_symbols(tr.y_index[i], model.y_size(i), n);
    tr.m[i] = bins.src[i].m[tr.y_index[i]];
    tr.f[i] = bins.src[i].f[tr.y_index[i]];
  }
  tr.y0 = make_seq(labels::Y[0], model.y_size(0), ys[0]);
  tr.y1 = make_seq(labels::Y[1], model.y_size(1), ys[1]);
  tr.y2 = make_seq(labels::Y[2], model.y_size(2), ys[2]);
  tr.type_index = joint_type_of({tr.x, tr.y0, tr.y1, tr.y2});
}

}  // namespace

double ProtocolConfig::delta_prime() const {
  if (delta_prime_override) {
    if (!(*delta_prime_override > 0.0)) throw ArgumentError("delta_prime must be positive");
    return *delta_prime_override;
  }
  return gwht::delta_prime(n, delta_c);
}

double ProtocolConfig::enum_budget() const { return budget > 0.0 ? budget : enumeration_budget(); }

void ProtocolConfig::validate() const {
  if (n < 1) throw ArgumentError("blocklength must be >= 1");
  for (const auto& l : xzs_labels())
    if (!source.has_axis(l)) throw ArgumentError("source pmf lacks axis '" + l + "'");
  for (const auto& l : xz_labels())
    if (!alt.has_axis(l)) throw ArgumentError("alternative pmf lacks axis '" + l + "'");
  HypothesisPair hyp{marginalize(source, xz_labels()), marginalize(alt, xz_labels())};
  validate_hypotheses(hyp);
  validate_channel(source, chan);
  for (const auto& l : xz_labels())
    if (axis_size(source, l) != axis_size(alt, l)) throw ArgumentError("alphabet of '" + l + "' differs");
  for (int i = 0; i < 3; ++i)
    if (!(rates.R[i] >= 0.0) || !(rates.Rt[i] >= 0.0)) throw ArgumentError("rates must be non-negative");
  delta_prime();
}

ProtocolModel::ProtocolModel(ProtocolConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  delta_ = cfg_.delta_prime();
  nx_ = axis_size(cfg_.source, labels::X);
  for (int i = 0; i < 3; ++i) ny_[i] = cfg_.chan.to_axes()[i].size;
  for (int j = 1; j <= 2; ++j) {
    nz_[j] = axis_size(cfg_.source, labels::Z[j]);
    ns_[j] = axis_size(cfg_.source, labels::S[j]);
  }
  p_xz_ = marginalize(cfg_.source, xz_labels()).weights();
  q_xz_ = marginalize(cfg_.alt, xz_labels()).weights();
  p_xzs_ = marginalize(cfg_.source, xzs_labels()).weights();

  const auto& W = cfg_.chan;
  const std::size_t ny = W.to_size();
  for (int i = 0; i < 3; ++i) comp_[i].assign(nx_ * ny_[i], 0.0);
  for (std::size_t x = 0; x < nx_; ++x)
    for (std::size_t y = 0; y < ny; ++y) {
      std::size_t y2 = y % ny_[2], y1 = (y / ny_[2]) % ny_[1], y0 = y / (ny_[2] * ny_[1]);
      comp_[0][x * ny_[0] + y0] += W(x, y);
      comp_[1][x * ny_[1] + y1] += W(x, y);
      comp_[2][x * ny_[2] + y2] += W(x, y);
    }
  factorizes_ = true;
  for (std::size_t x = 0; x < nx_ && factorizes_; ++x)
    for (std::size_t y = 0; y < ny; ++y) {
      std::size_t y2 = y % ny_[2], y1 = (y / ny_[2]) % ny_[1], y0 = y / (ny_[2] * ny_[1]);
      double prod = comp_[0][x * ny_[0] + y0] * comp_[1][x * ny_[1] + y1] * comp_[2][x * ny_[2] + y2];
      if (std::abs(prod - W(x, y)) > 1e-12) {
        factorizes_ = false;
        break;
      }
    }

  auto px = marginalize(cfg_.source, std::vector<std::string>{labels::X});
  target_xy_ = compose(px, W);
  for (int j = 1; j <= 2; ++j) {
    auto full = compose(marginalize(cfg_.source, std::vector<std::string>{labels::X, labels::Z[j]}), W);
    target_yz_[j] = marginalize(full, std::vector<std::string>{labels::Y[0], labels::Y[j], labels::Z[j]});
  }
}

std::vector<RestrictedLawEntry> restricted_law(const ProtocolModel& model, const BinningRealization& bins,
                                               const Sequence& x, const std::array<std::uint64_t, 3>& f) {
  std::array<std::span<const std::uint32_t>, 3> b;
  double count = 1.0;
  for (int i = 0; i < 3; ++i) {
    b[i] = bins.src[i].f_bucket(f[i]);
    count *= static_cast<double>(b[i].size());
  }
  const double budget = model.config().enum_budget();
  if (count > budget) throw ResourceError("restricted encoder law enumeration", count, budget);
  const auto& W = model.config().chan.rows();
  const std::size_t ny = model.config().chan.to_size();
  const std::size_t n = model.n();
  std::array<std::vector<std::vector<std::uint32_t>>, 3> sym;
  for (int i = 0; i < 3; ++i)
    for (auto s : b[i]) sym[i].push_back(sequence_symbols(s, model.y_size(i), n));
  std::vector<RestrictedLawEntry> out;
  double total = 0.0;
  for (std::size_t a = 0; a < b[0].size(); ++a)
    for (std::size_t c = 0; c < b[1].size(); ++c)
      for (std::size_t d = 0; d < b[2].size(); ++d) {
        double p = 1.0;
        for (std::size_t t = 0; t < n && p > 0.0; ++t) {
          std::size_t y = (sym[0][a][t] * model.y_size(1) + sym[1][c][t]) * model.y_size(2) + sym[2][d][t];
          p *= W[x.symbols[t] * ny + y];
        }
        if (p > 0.0) {
          out.push_back({{b[0][a], b[1][c], b[2][d]}, p});
          total += p;
        }
      }
  if (!(total > 0.0)) throw EncoderAbort();
  for (auto& e : out) e.prob /= total;
  return out;
}

Transcript encode_protocol_b(const ProtocolModel& model, const BinningRealization& bins, const Sequence& x,
                             const std::array<std::uint64_t, 3>& f, Rng& rng) {
  if (x.length() != model.n()) throw ArgumentError("x^n has the wrong length");
  Transcript tr;
  tr.x = x;
  if (model.factorizes()) {
    // P(y|x,f) factorizes into independent per-component restricted laws.
    std::vector<double> w;
    for (int i = 0; i < 3; ++i) {
      auto bucket = bins.src[i].f_bucket(f[i]);
      w.resize(bucket.size());
      double total = 0.0;
      for (std::size_t k = 0; k < bucket.size(); ++k) {
        w[k] = seq_weight(model.component(i), model.y_size(i), x.symbols, bucket[k]);
        total += w[k];
      }
      if (!(total > 0.0)) throw EncoderAbort();
      tr.y_index[i] = bucket[rng.categorical(w)];
    }
  } else {
    auto law = restricted_law(model, bins, x, f);
    std::vector<double> w;
    w.reserve(law.size());
    for (const auto& e : law) w.push_back(e.prob);
    tr.y_index = law[rng.categorical(w)].y;
  }
  fill_transcript(model, bins, tr);
  return tr;
}

Transcript encode_protocol_a(const ProtocolModel& model, const BinningRealization& bins, const Sequence& x, Rng& rng) {
  if (x.length() != model.n()) throw ArgumentError("x^n has the wrong length");
  const auto& W = model.config().chan;
  const std::size_t ny = W.to_size();
  Transcript tr;
  tr.x = x;
  std::array<std::size_t, 3> idx{0, 0, 0};
  std::vector<double> row(ny);
  for (std::size_t t = 0; t < x.length(); ++t) {
    for (std::size_t y = 0; y < ny; ++y) row[y] = W(x.symbols[t], y);
    std::size_t y = rng.categorical(row);
    std::size_t y2 = y % model.y_size(2), y1 = (y / model.y_size(2)) % model.y_size(1),
                y0 = y / (model.y_size(2) * model.y_size(1));
    idx[0] = idx[0] * model.y_size(0) + y0;
    idx[1] = idx[1] * model.y_size(1) + y1;
    idx[2] = idx[2] * model.y_size(2) + y2;
  }
  for (int i = 0; i < 3; ++i) tr.y_index[i] = static_cast<std::uint32_t>(idx[i]);
  fill_transcript(model, bins, tr);
  return tr;
}

DetectionEvents detect_events(const ProtocolModel& model, const BinningRealization& bins, int j, const Sequence& z,
                              std::uint64_t m0, std::uint64_t mj, std::uint64_t f0, std::uint64_t fj,
                              const JointNType& type_index, std::optional<std::array<std::uint32_t, 2>> true_pair) {
  if (j != 1 && j != 2) throw ArgumentError("detector index must be 1 or 2");
  const std::size_t n = model.n();
  if (z.length() != n) throw ArgumentError("z^n has the wrong length");
  const double delta = model.delta();
  DetectionEvents ev;
  ev.e0 = is_delta_close(type_index, model.target_xy(), delta);

  auto b0 = bins.src[0].bucket(m0, f0);
  auto bj = bins.src[j].bucket(mj, fj);
  const double pairs = static_cast<double>(b0.size()) * static_cast<double>(bj.size());
  const double budget = model.config().enum_budget();
  if (pairs > budget) throw ResourceError("detector bucket intersection", pairs, budget);

  const std::size_t a0 = model.y_size(0), aj = model.y_size(j), az = model.z_size(j);
  const auto& target = model.target_yz(j).weights();
  std::vector<std::vector<std::uint32_t>> s0, sj;
  for (auto s : b0) s0.push_back(sequence_symbols(s, a0, n));
  for (auto s : bj) sj.push_back(sequence_symbols(s, aj, n));
  std::vector<std::uint32_t> counts(a0 * aj * az);
  auto typical = [&](const std::vector<std::uint32_t>& y0, const std::vector<std::uint32_t>& yj) {
    std::fill(counts.begin(), counts.end(), 0u);
    for (std::size_t t = 0; t < n; ++t) ++counts[(y0[t] * aj + yj[t]) * az + z.symbols[t]];
    for (std::size_t c = 0; c < counts.size(); ++c)
      if (!(std::abs(static_cast<double>(counts[c]) / n - target[c]) < delta)) return false;
    return true;
  };

  for (std::size_t a = 0; a < b0.size(); ++a) {
    for (std::size_t b = 0; b < bj.size(); ++b) {
      bool is_true = true_pair && b0[a] == (*true_pair)[0] && bj[b] == (*true_pair)[1];
      if (is_true ? ev.ej_sender : ev.ej_non_sender) continue;
      if (!true_pair && ev.ej) break;
      if (typical(s0[a], sj[b])) {
        ev.ej = true;
        if (is_true)
          ev.ej_sender = true;
        else
          ev.ej_non_sender = true;
      }
    }
    if (!true_pair && ev.ej) break;
  }
  ev.decision = (ev.e0 && ev.ej) ? 0 : 1;
  return ev;
}

int detect(const ProtocolModel& model, const BinningRealization& bins, int j, const Sequence& z, std::uint64_t m0,
           std::uint64_t mj, std::uint64_t f0, std::uint64_t fj, const JointNType& type_index) {
  return detect_events(model, bins, j, z, m0, mj, f0, fj, type_index).decision;
}

namespace {

struct TrialOut {
  std::array<int, 3> decision{1, 1, 1};
  std::uint64_t aborts = 0;
  std::array<int, 3> violation{0, 0, 0};
};

// Cumulative sampler over a small per-letter table.
struct LetterSampler {
  std::vector<double> cum;
  explicit LetterSampler(const std::vector<double>& w) {
    double s = 0.0;
    for (double v : w) cum.push_back(s += v);
  }
  std::size_t draw(Rng& rng) const {
    double u = rng.uniform01() * cum.back();
    auto it = std::upper_bound(cum.begin(), cum.end(), u);
    std::size_t i = static_cast<std::size_t>(it - cum.begin());
    if (i >= cum.size()) i = cum.size() - 1;
    while (i > 0 && cum[i] == cum[i - 1]) --i;  // never land on a zero-mass cell
    return i;
  }
};

}  // namespace

ErrorReport estimate_errors(const ProtocolModel& model, std::size_t trials, std::uint64_t seed,
                            const SimulationOptions& opts) {
  if (trials == 0) throw ArgumentError("need at least one trial");
  Rng bin_rng = Rng::derive(seed, {0xB1175u});
  const BinningRealization bins = sample_binning(model, bin_rng);
  const std::size_t n = model.n();
  const std::size_t nz1 = model.z_size(1), nz2 = model.z_size(2);

  ErrorReport rep;
  rep.n = n;
  rep.trials = trials;
  for (int h = 0; h < 2; ++h) {
    LetterSampler letters(model.xz_table(h));
    std::vector<TrialOut> outs(trials);
    parallel_for(trials, opts.workers, [&](std::size_t k) {
      Rng rng = Rng::derive(seed, {static_cast<std::uint64_t>(h), k});
      std::vector<std::uint32_t> x(n), z1(n), z2(n);
      for (std::size_t t = 0; t < n; ++t) {
        std::size_t c = letters.draw(rng);
        z2[t] = static_cast<std::uint32_t>(c % nz2);
        z1[t] = static_cast<std::uint32_t>((c / nz2) % nz1);
        x[t] = static_cast<std::uint32_t>(c / (nz2 * nz1));
      }
      Sequence xs = make_seq(labels::X, model.x_size(), x);
      Sequence zs[3] = {{}, make_seq(labels::Z[1], nz1, z1), make_seq(labels::Z[2], nz2, z2)};
      TrialOut& o = outs[k];
      Transcript tr;
      if (opts.mode == ProtocolMode::A) {
        tr = encode_protocol_a(model, bins, xs, rng);
      } else {
        for (;;) {
          std::array<std::uint64_t, 3> f;
          for (int i = 0; i < 3; ++i) f[i] = rng.below(bins.src[i].f_bins);
          try {
            tr = encode_protocol_b(model, bins, xs, f, rng);
            break;
          } catch (const EncoderAbort&) {
            if (++o.aborts > opts.max_resamples)
              throw ResourceError("encoder resampling of f", static_cast<double>(o.aborts),
                                  static_cast<double>(opts.max_resamples));
          }
        }
      }
      for (int j = 1; j <= 2; ++j) {
        std::optional<std::array<std::uint32_t, 2>> truth;
        if (opts.check_witness) truth = std::array<std::uint32_t, 2>{tr.y_index[0], tr.y_index[j]};
        auto ev = detect_events(model, bins, j, zs[j], tr.m[0], tr.m[j], tr.f[0], tr.f[j], tr.type_index, truth);
        o.decision[j] = ev.decision;
        if (opts.check_witness && (ev.ej != (ev.ej_sender || ev.ej_non_sender) || (ev.ej_sender && !ev.ej)))
          o.violation[j] = 1;
      }
    });
    std::array<std::uint64_t, 3> errs{0, 0, 0};
    for (const auto& o : outs) {
      rep.aborts[h] += o.aborts;
      for (int j = 1; j <= 2; ++j) {
        // Type I: decide 1 under H0. Type II: decide 0 under H1.
        if (o.decision[j] == (h == 0 ? 1 : 0)) ++errs[j];
        rep.witness_violations[j] += o.violation[j];
      }
    }
    for (int j = 1; j <= 2; ++j) {
      double r = static_cast<double>(errs[j]) / static_cast<double>(trials);
      double se = std::sqrt(r * (1.0 - r) / static_cast<double>(trials));
      (h == 0 ? rep.alpha : rep.beta)[j] = r;
      (h == 0 ? rep.alpha_se : rep.beta_se)[j] = se;
    }
  }
  return rep;
}

}  // namespace gwht
