#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <vector>

#include "gwht/prob.hpp"
#include "gwht/random.hpp"

namespace gwht {

using BigInt = boost::multiprecision::cpp_int;

struct NType {
  Alphabet alphabet;
  std::vector<std::uint32_t> counts;
  std::uint32_t n = 0;

  double freq(std::size_t a) const { return static_cast<double>(counts[a]) / n; }
  JointPmf as_pmf() const;
  bool operator==(const NType&) const = default;
};

struct JointNType {
  std::vector<Alphabet> axes;
  std::vector<std::uint32_t> counts;  // row-major over axes
  std::uint32_t n = 0;

  JointPmf as_pmf() const;
  bool operator==(const JointNType&) const = default;
};

struct Sequence {
  Alphabet alphabet;
  std::vector<std::uint32_t> symbols;

  std::size_t length() const { return symbols.size(); }
  bool operator==(const Sequence&) const = default;
};

// Default 1e7; GWHT_ENUM_BUDGET overrides.
double enumeration_budget();

// C(n+k-1, k-1).
BigInt ntype_count(std::size_t alphabet_size, std::size_t n);

// All compositions of n, first count descending: (2,0),(1,1),(0,2).
std::vector<NType> enumerate_ntypes(const Alphabet& alphabet, std::uint32_t n);
std::vector<NType> enumerate_ntypes(const Alphabet& alphabet, std::uint32_t n, double budget);

NType type_of(const Sequence& seq);
JointNType joint_type_of(const std::vector<Sequence>& seqs);
// Joint type of symbol columns already laid out as a row-major cell index per position.
JointNType joint_type_from_cells(const std::vector<Alphabet>& axes, const std::vector<std::size_t>& cells);

BigInt type_class_size(const NType& t);
// Number of sequences on the other axes sharing this joint type with a fixed
// sequence on given_axis.
BigInt conditional_type_class_size(const JointNType& joint, std::size_t given_axis);

double ntype_entropy(const NType& t);

// Strict entrywise closeness, max |a - b| < delta.
bool is_delta_close(const JointPmf& a, const JointPmf& b, double delta);
bool is_delta_close(const NType& a, const JointPmf& b, double delta);
bool is_delta_close(const JointNType& a, const JointPmf& b, double delta);

// delta'_n = c * n^(-1/3).
double delta_prime(std::size_t n, double c = 1.0);

Sequence sample_constant_composition(const NType& t, Rng& rng);

}  // namespace gwht
