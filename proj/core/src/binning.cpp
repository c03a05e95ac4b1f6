#include <algorithm>
#include <cmath>
#include <numeric>

#include "gwht/errors.hpp"
#include "gwht/osrb.hpp"
#include "gwht/protocol.hpp"

namespace gwht {

std::size_t sequence_index(const std::vector<std::uint32_t>& symbols, std::size_t alphabet) {
  std::size_t idx = 0;
  for (auto s : symbols) {
    if (s >= alphabet) throw ArgumentError("symbol out of alphabet range");
    idx = idx * alphabet + s;
  }
  return idx;
}

std::vector<std::uint32_t> sequence_symbols(std::size_t index, std::size_t alphabet, std::size_t n) {
  std::vector<std::uint32_t> s(n);
  for (std::size_t t = n; t-- > 0;) {
    s[t] = static_cast<std::uint32_t>(index % alphabet);
    index /= alphabet;
  }
  return s;
}

namespace {

template <class Key>
void sort_index(const std::vector<Key>& key_of_seq, std::vector<Key>& keys, std::vector<std::uint32_t>& seqs) {
  seqs.resize(key_of_seq.size());
  std::iota(seqs.begin(), seqs.end(), 0u);
  std::stable_sort(seqs.begin(), seqs.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return key_of_seq[a] < key_of_seq[b]; });
  keys.resize(seqs.size());
  for (std::size_t k = 0; k < seqs.size(); ++k) keys[k] = key_of_seq[seqs[k]];
}

template <class Key>
std::span<const std::uint32_t> lookup(const std::vector<Key>& keys, const std::vector<std::uint32_t>& seqs, Key k) {
  auto [lo, hi] = std::equal_range(keys.begin(), keys.end(), k);
  return std::span<const std::uint32_t>(seqs.data() + (lo - keys.begin()), static_cast<std::size_t>(hi - lo));
}

}  // namespace

void SourceBins::index() {
  if (m.size() != sequences || f.size() != sequences) throw ArgumentError("bin maps must cover every sequence");
  std::vector<std::uint64_t> mf(sequences);
  for (std::size_t s = 0; s < sequences; ++s) {
    if (m[s] >= m_bins || f[s] >= f_bins) throw ArgumentError("bin index out of range");
    mf[s] = static_cast<std::uint64_t>(m[s]) * f_bins + f[s];
  }
  sort_index(mf, mf_keys, mf_seqs);
  sort_index(f, f_keys, f_seqs);
}

std::span<const std::uint32_t> SourceBins::bucket(std::uint64_t mi, std::uint64_t fi) const {
  return lookup<std::uint64_t>(mf_keys, mf_seqs, mi * f_bins + fi);
}

std::span<const std::uint32_t> SourceBins::f_bucket(std::uint64_t fi) const {
  return lookup<std::uint32_t>(f_keys, f_seqs, static_cast<std::uint32_t>(fi));
}

BinningRealization BinningRealization::from_maps(std::size_t n, const std::array<std::size_t, 3>& alphabets,
                                                 const std::array<std::uint64_t, 3>& m_bins,
                                                 const std::array<std::uint64_t, 3>& f_bins,
                                                 std::array<std::vector<std::uint32_t>, 3> m,
                                                 std::array<std::vector<std::uint32_t>, 3> f) {
  BinningRealization b;
  b.n = n;
  for (int i = 0; i < 3; ++i) {
    auto& s = b.src[i];
    s.alphabet = alphabets[i];
    s.sequences = static_cast<std::size_t>(std::llround(std::pow(static_cast<double>(alphabets[i]), n)));
    s.m_bins = m_bins[i];
    s.f_bins = f_bins[i];
    s.m = std::move(m[i]);
    s.f = std::move(f[i]);
    s.index();
  }
  return b;
}

BinningRealization sample_binning(const ProtocolModel& model, Rng& rng) {
  const auto& cfg = model.config();
  const double budget = cfg.enum_budget();
  BinningRealization b;
  b.n = cfg.n;
  for (int i = 0; i < 3; ++i) {
    double count = std::pow(static_cast<double>(model.y_size(i)), static_cast<double>(cfg.n));
    if (count > budget) throw ResourceError("binning storage |Y" + std::to_string(i) + "|^n", count, budget);
    if (count > 4.0e9) throw ResourceError("binning storage |Y" + std::to_string(i) + "|^n", count, 4.0e9);
    auto& s = b.src[i];
    s.alphabet = model.y_size(i);
    s.sequences = static_cast<std::size_t>(count);
    s.m_bins = bin_count(cfg.rates.R[i], cfg.n);
    s.f_bins = bin_count(cfg.rates.Rt[i], cfg.n);
    if (s.m_bins > 4.0e9 || s.f_bins > 4.0e9)
      throw ResourceError("bin count", static_cast<double>(std::max(s.m_bins, s.f_bins)), 4.0e9);
    s.m.resize(s.sequences);
    s.f.resize(s.sequences);
    for (auto& v : s.m) v = static_cast<std::uint32_t>(rng.below(s.m_bins));
    for (auto& v : s.f) v = static_cast<std::uint32_t>(rng.below(s.f_bins));
    s.index();
  }
  return b;
}

}  // namespace gwht
