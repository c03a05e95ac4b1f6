#include "gwht/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "gwht/errors.hpp"

namespace gwht {

namespace {

BigInt factorial(std::uint32_t n) {
  BigInt f = 1;
  for (std::uint32_t i = 2; i <= n; ++i) f *= i;
  return f;
}

std::vector<double> to_freqs(const std::vector<std::uint32_t>& counts, std::uint32_t n) {
  std::vector<double> w(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) w[i] = static_cast<double>(counts[i]) / n;
  return w;
}

bool close_tables(const std::vector<double>& a, const JointPmf& b, double delta) {
  if (!(delta > 0.0)) throw ArgumentError("delta must be positive");
  if (a.size() != b.size()) throw ArgumentError("typicality check: shape mismatch");
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!(std::abs(a[i] - b[i]) < delta)) return false;
  return true;
}

}  // namespace

JointPmf NType::as_pmf() const { return JointPmf::normalized({alphabet}, to_freqs(counts, n)); }

JointPmf JointNType::as_pmf() const { return JointPmf::normalized(axes, to_freqs(counts, n)); }

double enumeration_budget() {
  if (const char* env = std::getenv("GWHT_ENUM_BUDGET")) {
    char* end = nullptr;
    double v = std::strtod(env, &end);
    if (end != env && v > 0.0) return v;
  }
  return 1e7;
}

BigInt ntype_count(std::size_t alphabet_size, std::size_t n) {
  if (alphabet_size == 0) throw ArgumentError("alphabet size must be positive");
  // C(n+k-1, k-1) by the multiplicative formula; each partial product is exact.
  BigInt c = 1;
  for (std::size_t i = 1; i < alphabet_size; ++i) {
    c *= (n + i);
    c /= i;
  }
  return c;
}

std::vector<NType> enumerate_ntypes(const Alphabet& alphabet, std::uint32_t n) {
  return enumerate_ntypes(alphabet, n, enumeration_budget());
}

std::vector<NType> enumerate_ntypes(const Alphabet& alphabet, std::uint32_t n, double budget) {
  if (n < 1) throw ArgumentError("blocklength must be >= 1");
  if (alphabet.size == 0) throw ArgumentError("alphabet size must be positive");
  BigInt count = ntype_count(alphabet.size, n);
  double c = count.convert_to<double>();
  if (c > budget) throw ResourceError("n-type enumeration over '" + alphabet.label + "'", c, budget);

  std::vector<NType> out;
  out.reserve(static_cast<std::size_t>(c));
  const std::size_t k = alphabet.size;
  std::vector<std::uint32_t> cur(k, 0);
  // Depth-first, each position takes the largest remaining count first.
  auto rec = [&](auto&& self, std::size_t pos, std::uint32_t left) -> void {
    if (pos + 1 == k) {
      cur[pos] = left;
      out.push_back(NType{alphabet, cur, n});
      return;
    }
    for (std::uint32_t v = left + 1; v-- > 0;) {
      cur[pos] = v;
      self(self, pos + 1, left - v);
    }
  };
  rec(rec, 0, n);
  return out;
}

NType type_of(const Sequence& seq) {
  if (seq.symbols.empty()) throw ArgumentError("type of an empty sequence");
  NType t{seq.alphabet, std::vector<std::uint32_t>(seq.alphabet.size, 0),
          static_cast<std::uint32_t>(seq.symbols.size())};
  for (auto s : seq.symbols) {
    if (s >= seq.alphabet.size) throw ArgumentError("symbol out of alphabet range");
    ++t.counts[s];
  }
  return t;
}

JointNType joint_type_of(const std::vector<Sequence>& seqs) {
  if (seqs.empty()) throw ArgumentError("joint type of no sequences");
  const std::size_t n = seqs.front().length();
  if (n == 0) throw ArgumentError("joint type of empty sequences");
  std::vector<Alphabet> axes;
  for (const auto& s : seqs) {
    if (s.length() != n) throw ArgumentError("sequence length mismatch");
    axes.push_back(s.alphabet);
  }
  std::vector<std::size_t> sizes;
  for (const auto& a : axes) sizes.push_back(a.size);
  auto st = row_major_strides(sizes);
  std::vector<std::size_t> cells(n, 0);
  for (std::size_t k = 0; k < seqs.size(); ++k)
    for (std::size_t t = 0; t < n; ++t) {
      if (seqs[k].symbols[t] >= axes[k].size) throw ArgumentError("symbol out of alphabet range");
      cells[t] += seqs[k].symbols[t] * st[k];
    }
  return joint_type_from_cells(axes, cells);
}

JointNType joint_type_from_cells(const std::vector<Alphabet>& axes, const std::vector<std::size_t>& cells) {
  std::size_t total = 1;
  for (const auto& a : axes) total *= a.size;
  JointNType j{axes, std::vector<std::uint32_t>(total, 0), static_cast<std::uint32_t>(cells.size())};
  for (auto c : cells) {
    if (c >= total) throw ArgumentError("cell index out of range");
    ++j.counts[c];
  }
  return j;
}

BigInt type_class_size(const NType& t) {
  BigInt r = factorial(t.n);
  for (auto c : t.counts) r /= factorial(c);
  return r;
}

BigInt conditional_type_class_size(const JointNType& joint, std::size_t given_axis) {
  if (given_axis >= joint.axes.size()) throw ArgumentError("given axis out of range");
  std::uint64_t sum = 0;
  for (auto c : joint.counts) sum += c;
  if (sum != joint.n) throw ArgumentError("joint type counts do not sum to n");
  std::vector<std::size_t> sizes;
  for (const auto& a : joint.axes) sizes.push_back(a.size);
  std::vector<double> w(joint.counts.begin(), joint.counts.end());
  // Regroup as (given, rest) so each given symbol owns a contiguous row.
  AxisSet order{given_axis};
  for (std::size_t a = 0; a < sizes.size(); ++a)
    if (a != given_axis) order.push_back(a);
  auto grouped = marginal_table(w, sizes, order);
  const std::size_t gx = sizes[given_axis];
  const std::size_t rest = grouped.size() / gx;
  BigInt r = 1;
  for (std::size_t x = 0; x < gx; ++x) {
    std::uint32_t row = 0;
    BigInt denom = 1;
    for (std::size_t y = 0; y < rest; ++y) {
      auto c = static_cast<std::uint32_t>(std::llround(grouped[x * rest + y]));
      row += c;
      denom *= factorial(c);
    }
    r *= factorial(row) / denom;
  }
  return r;
}

double ntype_entropy(const NType& t) { return entropy_of_table(to_freqs(t.counts, t.n)); }

bool is_delta_close(const JointPmf& a, const JointPmf& b, double delta) {
  if (a.axes() != b.axes()) throw ArgumentError("typicality check: axis mismatch");
  return close_tables(a.weights(), b, delta);
}

bool is_delta_close(const NType& a, const JointPmf& b, double delta) {
  if (b.rank() != 1 || b.axes()[0].size != a.alphabet.size) throw ArgumentError("typicality check: axis mismatch");
  return close_tables(to_freqs(a.counts, a.n), b, delta);
}

bool is_delta_close(const JointNType& a, const JointPmf& b, double delta) {
  if (b.sizes().size() != a.axes.size()) throw ArgumentError("typicality check: axis mismatch");
  for (std::size_t i = 0; i < a.axes.size(); ++i)
    if (a.axes[i].size != b.axes()[i].size) throw ArgumentError("typicality check: axis mismatch");
  return close_tables(to_freqs(a.counts, a.n), b, delta);
}

double delta_prime(std::size_t n, double c) {
  if (n == 0) throw ArgumentError("blocklength must be >= 1");
  if (!(c > 0.0)) throw ArgumentError("typicality constant must be positive");
  return c * std::pow(static_cast<double>(n), -1.0 / 3.0);
}

Sequence sample_constant_composition(const NType& t, Rng& rng) {
  Sequence s{t.alphabet, {}};
  s.symbols.reserve(t.n);
  for (std::uint32_t a = 0; a < t.counts.size(); ++a) s.symbols.insert(s.symbols.end(), t.counts[a], a);
  if (s.symbols.size() != t.n) throw ArgumentError("type counts do not sum to n");
  rng.shuffle(s.symbols);
  return s;
}

}  // namespace gwht
