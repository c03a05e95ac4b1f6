#pragma once

#include <cstddef>
#include <initializer_list>
#include <limits>
#include <string>
#include <vector>

namespace gwht {

inline constexpr double kNormTol = 1e-12;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Alphabet {
  std::string label;
  std::size_t size = 1;

  bool operator==(const Alphabet&) const = default;
};

// Ordered subset of axis positions.
using AxisSet = std::vector<std::size_t>;

// Row-major strides for the given axis sizes (last axis fastest).
std::vector<std::size_t> row_major_strides(const std::vector<std::size_t>& sizes);

// Sum a dense table down to the axes in keep, in keep's order.
std::vector<double> marginal_table(const std::vector<double>& w,
                                   const std::vector<std::size_t>& sizes,
                                   const AxisSet& keep);

// -sum w log2 w over a (possibly unnormalized) table.
double entropy_of_table(const std::vector<double>& w);

class JointPmf {
 public:
  JointPmf() = default;
  // Rejects negative weights, shape mismatch, and sums off by more than kNormTol.
  JointPmf(std::vector<Alphabet> axes, std::vector<double> weights);

  // Divides non-negative weights by their (positive) sum.
  static JointPmf normalized(std::vector<Alphabet> axes, std::vector<double> weights);
  static JointPmf uniform(std::vector<Alphabet> axes);
  static JointPmf point_mass(std::vector<Alphabet> axes, const std::vector<std::size_t>& coords);

  const std::vector<Alphabet>& axes() const { return axes_; }
  std::size_t rank() const { return axes_.size(); }
  std::size_t size() const { return weights_.size(); }
  const std::vector<double>& weights() const { return weights_; }
  double operator[](std::size_t cell) const { return weights_[cell]; }
  double at(const std::vector<std::size_t>& coords) const { return weights_[cell_index(coords)]; }

  std::vector<std::size_t> sizes() const;
  const std::vector<std::size_t>& strides() const { return strides_; }
  std::size_t axis(const std::string& label) const;
  bool has_axis(const std::string& label) const;
  AxisSet axes_of(std::initializer_list<std::string> labels) const;
  AxisSet axes_of(const std::vector<std::string>& labels) const;

  std::size_t cell_index(const std::vector<std::size_t>& coords) const;
  std::vector<std::size_t> coords_of(std::size_t cell) const;

 private:
  void init_shape();

  std::vector<Alphabet> axes_;
  std::vector<double> weights_;
  std::vector<std::size_t> strides_;
};

using Pmf = JointPmf;

Pmf make_pmf(const std::string& label, std::vector<double> weights);

// p(to | from), one row over the product of to-axes per from-cell (row-major).
class CondPmf {
 public:
  CondPmf() = default;
  CondPmf(std::vector<Alphabet> from, std::vector<Alphabet> to, std::vector<double> rows);

  const std::vector<Alphabet>& from_axes() const { return from_; }
  const std::vector<Alphabet>& to_axes() const { return to_; }
  std::size_t from_size() const { return from_size_; }
  std::size_t to_size() const { return to_size_; }
  const std::vector<double>& rows() const { return rows_; }
  double operator()(std::size_t from_cell, std::size_t to_cell) const {
    return rows_[from_cell * to_size_ + to_cell];
  }

 private:
  std::vector<Alphabet> from_;
  std::vector<Alphabet> to_;
  std::vector<double> rows_;
  std::size_t from_size_ = 1;
  std::size_t to_size_ = 1;
};

// H(vars | given) in bits.
double entropy(const JointPmf& p, const AxisSet& vars, const AxisSet& given = {});
double mutual_information(const JointPmf& p, const AxisSet& a, const AxisSet& b,
                          const AxisSet& given = {});
// +inf when p has mass outside q's support.
double kl_divergence(const JointPmf& p, const JointPmf& q);
double tv_distance(const JointPmf& p, const JointPmf& q);

JointPmf marginalize(const JointPmf& p, const AxisSet& keep);
JointPmf marginalize(const JointPmf& p, const std::vector<std::string>& keep);
// Appends c's to-axes; c's from-axes are matched to p's axes by label.
JointPmf compose(const JointPmf& p, const CondPmf& c);
JointPmf product(const JointPmf& a, const JointPmf& b);
// p(to | from); rows with zero from-mass are uniform.
CondPmf conditional(const JointPmf& p, const AxisSet& from, const AxisSet& to);

double entropy_continuity_bound(double theta, std::size_t out_alphabet_size, bool conditional);

}  // namespace gwht
