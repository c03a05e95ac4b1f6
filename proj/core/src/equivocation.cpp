#include <cmath>
#include <map>
#include <tuple>

#include "gwht/errors.hpp"
#include "gwht/osrb.hpp"
#include "gwht/protocol.hpp"

namespace gwht {

namespace {

double dpow(double b, std::size_t e) { return std::pow(b, static_cast<double>(e)); }

std::size_t ipow(std::size_t b, std::size_t e) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < e; ++i) r *= b;
  return r;
}

// P_A(M_i = m, F_i = f | x^n), laid out [(m * F + f) * |X|^n + x].
std::vector<double> mf_given_x(const ProtocolModel& model, const SourceBins& sb, int i) {
  std::vector<std::uint32_t> key(sb.sequences);
  for (std::size_t s = 0; s < sb.sequences; ++s) key[s] = static_cast<std::uint32_t>(sb.m[s] * sb.f_bins + sb.f[s]);
  return bin_given_sequence(model.n(), model.component(i), model.x_size(), model.y_size(i), key,
                            sb.m_bins * sb.f_bins);
}

// Message law P(M = m | x^n) from a joint (m, f) table; protocol B draws f
// uniformly among the f with non-empty restricted support.
std::vector<double> message_law(const std::vector<double>& j, std::size_t M, std::size_t F, std::size_t XN,
                                ProtocolMode mode) {
  std::vector<double> q(M * XN, 0.0), pa(F);
  for (std::size_t x = 0; x < XN; ++x) {
    std::fill(pa.begin(), pa.end(), 0.0);
    for (std::size_t m = 0; m < M; ++m)
      for (std::size_t f = 0; f < F; ++f) pa[f] += j[(m * F + f) * XN + x];
    std::size_t nonempty = 0;
    for (double v : pa) nonempty += v > 0.0;
    for (std::size_t m = 0; m < M; ++m) {
      double acc = 0.0;
      for (std::size_t f = 0; f < F; ++f) {
        double v = j[(m * F + f) * XN + x];
        if (mode == ProtocolMode::A)
          acc += v;
        else if (pa[f] > 0.0)
          acc += v / pa[f] / static_cast<double>(nonempty);
      }
      q[m * XN + x] = acc;
    }
  }
  return q;
}

// Joint message law of (M0, Mi) given x^n, laid out [(m0 * Mi + mi) * XN + x].
std::vector<double> pair_message_law(const ProtocolModel& model, const BinningRealization& bins, int i,
                                     ProtocolMode mode) {
  const std::size_t n = model.n(), XN = ipow(model.x_size(), n);
  const auto& b0 = bins.src[0];
  const auto& bi = bins.src[i];
  const std::size_t M0 = b0.m_bins, Mi = bi.m_bins;
  std::vector<double> out(M0 * Mi * XN, 0.0);
  if (model.factorizes()) {
    auto q0 = message_law(mf_given_x(model, b0, 0), M0, b0.f_bins, XN, mode);
    auto qi = message_law(mf_given_x(model, bi, i), Mi, bi.f_bins, XN, mode);
    for (std::size_t a = 0; a < M0; ++a)
      for (std::size_t b = 0; b < Mi; ++b)
        for (std::size_t x = 0; x < XN; ++x) out[(a * Mi + b) * XN + x] = q0[a * XN + x] * qi[b * XN + x];
    return out;
  }
  // General channel: enumerate the super-alphabet with key (m0, mi, f0, f1, f2).
  const std::size_t F0 = bins.src[0].f_bins, F1 = bins.src[1].f_bins, F2 = bins.src[2].f_bins;
  const std::size_t F = F0 * F1 * F2;
  const std::size_t K = model.config().chan.to_size();
  const std::size_t KN = ipow(K, n);
  std::vector<std::uint32_t> key(KN);
  for (std::size_t yi = 0; yi < KN; ++yi) {
    auto sup = sequence_symbols(yi, K, n);
    std::size_t idx[3] = {0, 0, 0};
    for (auto s : sup) {
      std::size_t y2 = s % model.y_size(2), y1 = (s / model.y_size(2)) % model.y_size(1),
                  y0 = s / (model.y_size(2) * model.y_size(1));
      idx[0] = idx[0] * model.y_size(0) + y0;
      idx[1] = idx[1] * model.y_size(1) + y1;
      idx[2] = idx[2] * model.y_size(2) + y2;
    }
    std::size_t f = (bins.src[0].f[idx[0]] * F1 + bins.src[1].f[idx[1]]) * F2 + bins.src[2].f[idx[2]];
    std::size_t m = b0.m[idx[0]] * Mi + bi.m[idx[i]];
    key[yi] = static_cast<std::uint32_t>(m * F + f);
  }
  auto j = bin_given_sequence(n, model.config().chan.rows(), model.x_size(), K, key, M0 * Mi * F);
  return message_law(j, M0 * Mi, F, XN, mode);
}

double entropy_of_counts(const std::map<std::tuple<std::size_t, std::size_t, std::uint64_t, std::uint64_t>, double>& c,
                         bool drop_s, double total) {
  std::map<std::tuple<std::size_t, std::size_t, std::uint64_t, std::uint64_t>, double> agg;
  const std::map<std::tuple<std::size_t, std::size_t, std::uint64_t, std::uint64_t>, double>* src = &c;
  if (drop_s) {
    for (const auto& [k, v] : c) agg[{0, std::get<1>(k), std::get<2>(k), std::get<3>(k)}] += v;
    src = &agg;
  }
  double h = 0.0;
  for (const auto& [k, v] : *src) {
    double p = v / total;
    h -= p * std::log2(p);
  }
  // Miller-Madow bias correction in bits.
  h += (static_cast<double>(src->size()) - 1.0) / (2.0 * total * std::log(2.0));
  return h;
}

}  // namespace

double estimate_equivocation(const ProtocolModel& model, const BinningRealization& bins, int i,
                             EquivocationMode mode, std::size_t trials, std::uint64_t seed, ProtocolMode protocol) {
  if (i != 1 && i != 2) throw ArgumentError("detector index must be 1 or 2");
  const std::size_t n = model.n();
  const std::size_t nx = model.x_size(), nz = model.z_size(i), ns = model.s_size(i);
  auto letters = marginalize(model.config().source,
                             std::vector<std::string>{labels::X, labels::Z[i], labels::S[i]})
                     .weights();

  if (mode == EquivocationMode::Exact) {
    const double budget = model.config().enum_budget();
    const double work = dpow(static_cast<double>(nx * nz * ns), n) *
                        static_cast<double>(bins.src[0].m_bins * bins.src[i].m_bins);
    if (work > budget) throw ResourceError("exact equivocation enumeration", work, budget);
    const std::size_t XN = ipow(nx, n), ZN = ipow(nz, n), SN = ipow(ns, n);
    const std::size_t MM = bins.src[0].m_bins * bins.src[i].m_bins;
    auto q = pair_message_law(model, bins, i, protocol);
    std::vector<double> joint(ZN * SN * MM, 0.0);
    std::vector<std::vector<std::uint32_t>> xs(XN), zs(ZN), ss(SN);
    for (std::size_t a = 0; a < XN; ++a) xs[a] = sequence_symbols(a, nx, n);
    for (std::size_t a = 0; a < ZN; ++a) zs[a] = sequence_symbols(a, nz, n);
    for (std::size_t a = 0; a < SN; ++a) ss[a] = sequence_symbols(a, ns, n);
    for (std::size_t z = 0; z < ZN; ++z)
      for (std::size_t s = 0; s < SN; ++s) {
        double* row = &joint[(z * SN + s) * MM];
        for (std::size_t x = 0; x < XN; ++x) {
          double p = 1.0;
          for (std::size_t t = 0; t < n && p > 0.0; ++t) p *= letters[(xs[x][t] * nz + zs[z][t]) * ns + ss[s][t]];
          if (p == 0.0) continue;
          for (std::size_t m = 0; m < MM; ++m) row[m] += p * q[m * XN + x];
        }
      }
    // H(S | Z, M) = H(Z, S, M) - H(Z, M).
    std::vector<double> zm(ZN * MM, 0.0);
    for (std::size_t z = 0; z < ZN; ++z)
      for (std::size_t s = 0; s < SN; ++s)
        for (std::size_t m = 0; m < MM; ++m) zm[z * MM + m] += joint[(z * SN + s) * MM + m];
    double h = entropy_of_table(joint) - entropy_of_table(zm);
    return std::max(0.0, h) / static_cast<double>(n);
  }

  if (trials == 0) throw ArgumentError("plugin equivocation needs at least one trial");
  const std::size_t nz1 = model.z_size(1), nz2 = model.z_size(2), ns1 = model.s_size(1), ns2 = model.s_size(2);
  const auto& table = model.xzs_table();
  std::map<std::tuple<std::size_t, std::size_t, std::uint64_t, std::uint64_t>, double> counts;
  for (std::size_t k = 0; k < trials; ++k) {
    Rng rng = Rng::derive(seed, {0xE9u, static_cast<std::uint64_t>(i), k});
    std::vector<std::uint32_t> x(n), z(n), s(n);
    for (std::size_t t = 0; t < n; ++t) {
      std::size_t c = rng.categorical(table);
      std::size_t s2 = c % ns2, s1 = (c / ns2) % ns1, z2 = (c / (ns2 * ns1)) % nz2,
                  z1 = (c / (ns2 * ns1 * nz2)) % nz1, xx = c / (ns2 * ns1 * nz2 * nz1);
      x[t] = static_cast<std::uint32_t>(xx);
      z[t] = static_cast<std::uint32_t>(i == 1 ? z1 : z2);
      s[t] = static_cast<std::uint32_t>(i == 1 ? s1 : s2);
    }
    Sequence xs{Alphabet{labels::X, nx}, x};
    Transcript tr;
    if (protocol == ProtocolMode::A) {
      tr = encode_protocol_a(model, bins, xs, rng);
    } else {
      for (std::uint64_t tries = 0;; ++tries) {
        std::array<std::uint64_t, 3> f;
        for (int c = 0; c < 3; ++c) f[c] = rng.below(bins.src[c].f_bins);
        try {
          tr = encode_protocol_b(model, bins, xs, f, rng);
          break;
        } catch (const EncoderAbort&) {
          if (tries > 1000000) throw ResourceError("encoder resampling of f", static_cast<double>(tries), 1e6);
        }
      }
    }
    counts[{sequence_index(s, ns), sequence_index(z, nz), tr.m[0], tr.m[i]}] += 1.0;
  }
  const double total = static_cast<double>(trials);
  double h = entropy_of_counts(counts, false, total) - entropy_of_counts(counts, true, total);
  return std::max(0.0, h) / static_cast<double>(n);
}

double duality_tv(const ProtocolModel& model, const BinningRealization& bins) {
  const std::size_t n = model.n(), nx = model.x_size(), XN = ipow(nx, n);
  auto px = marginalize(model.config().source, std::vector<std::string>{labels::X}).weights();
  std::vector<double> pxn(XN);
  for (std::size_t x = 0; x < XN; ++x) {
    auto sym = sequence_symbols(x, nx, n);
    double p = 1.0;
    for (auto v : sym) p *= px[v];
    pxn[x] = p;
  }
  const std::size_t F0 = bins.src[0].f_bins, F1 = bins.src[1].f_bins, F2 = bins.src[2].f_bins;
  const double uniform = 1.0 / (static_cast<double>(F0) * static_cast<double>(F1) * static_cast<double>(F2));
  double tv = 0.0;
  if (model.factorizes()) {
    std::array<std::vector<double>, 3> pa;
    for (int i = 0; i < 3; ++i) {
      const auto& sb = bins.src[i];
      pa[i] = bin_given_sequence(n, model.component(i), nx, model.y_size(i), sb.f, sb.f_bins);
    }
    for (std::size_t x = 0; x < XN; ++x) {
      if (pxn[x] == 0.0) continue;
      double acc = 0.0;
      for (std::size_t a = 0; a < F0; ++a)
        for (std::size_t b = 0; b < F1; ++b) {
          double ab = pa[0][a * XN + x] * pa[1][b * XN + x];
          for (std::size_t c = 0; c < F2; ++c) acc += std::abs(ab * pa[2][c * XN + x] - uniform);
        }
      tv += pxn[x] * acc;
    }
    return 0.5 * tv;
  }
  const std::size_t K = model.config().chan.to_size();
  const std::size_t KN = ipow(K, n);
  std::vector<std::uint32_t> key(KN);
  for (std::size_t yi = 0; yi < KN; ++yi) {
    auto sup = sequence_symbols(yi, K, n);
    std::size_t idx[3] = {0, 0, 0};
    for (auto s : sup) {
      std::size_t y2 = s % model.y_size(2), y1 = (s / model.y_size(2)) % model.y_size(1),
                  y0 = s / (model.y_size(2) * model.y_size(1));
      idx[0] = idx[0] * model.y_size(0) + y0;
      idx[1] = idx[1] * model.y_size(1) + y1;
      idx[2] = idx[2] * model.y_size(2) + y2;
    }
    key[yi] = static_cast<std::uint32_t>((bins.src[0].f[idx[0]] * F1 + bins.src[1].f[idx[1]]) * F2 +
                                         bins.src[2].f[idx[2]]);
  }
  auto j = bin_given_sequence(n, model.config().chan.rows(), nx, K, key, F0 * F1 * F2);
  for (std::size_t x = 0; x < XN; ++x)
    for (std::size_t f = 0; f < F0 * F1 * F2; ++f) tv += pxn[x] * std::abs(j[f * XN + x] - uniform);
  return 0.5 * tv;
}

}  // namespace gwht
