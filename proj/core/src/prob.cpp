#include "gwht/prob.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "gwht/errors.hpp"

namespace gwht {

namespace {

std::size_t product_of(const std::vector<Alphabet>& axes) {
  std::size_t n = 1;
  for (const auto& a : axes) {
    if (a.size == 0) throw ArgumentError("alphabet '" + a.label + "' has size 0");
    n *= a.size;
  }
  return n;
}

std::vector<std::size_t> sizes_of(const std::vector<Alphabet>& axes) {
  std::vector<std::size_t> s;
  s.reserve(axes.size());
  for (const auto& a : axes) s.push_back(a.size);
  return s;
}

void check_axis_set(const AxisSet& s, std::size_t rank, const char* what) {
  std::set<std::size_t> seen;
  for (auto a : s) {
    if (a >= rank) throw ArgumentError(std::string(what) + ": axis index out of range");
    if (!seen.insert(a).second) throw ArgumentError(std::string(what) + ": repeated axis");
  }
}

void check_disjoint(const AxisSet& a, const AxisSet& b) {
  for (auto x : a)
    if (std::find(b.begin(), b.end(), x) != b.end())
      throw ArgumentError("axis subsets overlap");
}

void check_same_axes(const JointPmf& p, const JointPmf& q) {
  if (p.axes() != q.axes()) throw ArgumentError("pmfs are defined over different axes");
}

double kahan_sum(const std::vector<double>& w) {
  double s = 0.0, c = 0.0;
  for (double v : w) {
    double y = v - c;
    double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return s;
}

}  // namespace

std::vector<std::size_t> row_major_strides(const std::vector<std::size_t>& sizes) {
  std::vector<std::size_t> st(sizes.size(), 1);
  for (std::size_t i = sizes.size(); i-- > 1;) st[i - 1] = st[i] * sizes[i];
  return st;
}

std::vector<double> marginal_table(const std::vector<double>& w,
                                   const std::vector<std::size_t>& sizes,
                                   const AxisSet& keep) {
  const std::size_t rank = sizes.size();
  std::vector<std::size_t> keep_sizes;
  for (auto k : keep) keep_sizes.push_back(sizes[k]);
  auto kst = row_major_strides(keep_sizes);
  // Output stride contributed by each source axis (0 for summed-out axes).
  std::vector<std::size_t> out_stride(rank, 0);
  for (std::size_t i = 0; i < keep.size(); ++i) out_stride[keep[i]] = kst[i];
  std::size_t out_size = 1;
  for (auto s : keep_sizes) out_size *= s;
  std::vector<double> out(out_size, 0.0);

  std::vector<std::size_t> coord(rank, 0);
  std::size_t oi = 0;
  for (std::size_t cell = 0; cell < w.size(); ++cell) {
    out[oi] += w[cell];
    for (std::size_t ax = rank; ax-- > 0;) {
      if (++coord[ax] < sizes[ax]) {
        oi += out_stride[ax];
        break;
      }
      oi -= out_stride[ax] * (sizes[ax] - 1);
      coord[ax] = 0;
    }
  }
  return out;
}

double entropy_of_table(const std::vector<double>& w) {
  double h = 0.0;
  for (double v : w)
    if (v > 0.0) h -= v * std::log2(v);
  return h;
}

JointPmf::JointPmf(std::vector<Alphabet> axes, std::vector<double> weights)
    : axes_(std::move(axes)), weights_(std::move(weights)) {
  if (axes_.empty()) throw ArgumentError("joint pmf needs at least one axis");
  std::set<std::string> labels;
  for (const auto& a : axes_)
    if (!labels.insert(a.label).second) throw ArgumentError("duplicate axis label '" + a.label + "'");
  if (weights_.size() != product_of(axes_))
    throw ArgumentError("weight table has " + std::to_string(weights_.size()) + " entries, expected " +
                        std::to_string(product_of(axes_)));
  for (double v : weights_)
    if (!(v >= 0.0) || !std::isfinite(v)) throw ArgumentError("negative or non-finite probability");
  double s = kahan_sum(weights_);
  if (std::abs(s - 1.0) > kNormTol)
    throw ArgumentError("weights sum to " + std::to_string(s) + ", not 1");
  init_shape();
}

void JointPmf::init_shape() { strides_ = row_major_strides(sizes()); }

JointPmf JointPmf::normalized(std::vector<Alphabet> axes, std::vector<double> weights) {
  double s = kahan_sum(weights);
  if (!(s > 0.0)) throw ArgumentError("cannot normalize a table with zero mass");
  for (auto& v : weights) {
    if (v < 0.0) throw ArgumentError("negative weight");
    v /= s;
  }
  JointPmf p;
  p.axes_ = std::move(axes);
  if (weights.size() != product_of(p.axes_)) throw ArgumentError("weight table shape mismatch");
  p.weights_ = std::move(weights);
  p.init_shape();
  return p;
}

JointPmf JointPmf::uniform(std::vector<Alphabet> axes) {
  std::size_t n = product_of(axes);
  return normalized(std::move(axes), std::vector<double>(n, 1.0));
}

JointPmf JointPmf::point_mass(std::vector<Alphabet> axes, const std::vector<std::size_t>& coords) {
  std::size_t n = product_of(axes);
  std::vector<double> w(n, 0.0);
  JointPmf tmp = normalized(axes, std::vector<double>(n, 1.0));
  w[tmp.cell_index(coords)] = 1.0;
  return JointPmf(std::move(axes), std::move(w));
}

std::vector<std::size_t> JointPmf::sizes() const { return sizes_of(axes_); }

std::size_t JointPmf::axis(const std::string& label) const {
  for (std::size_t i = 0; i < axes_.size(); ++i)
    if (axes_[i].label == label) return i;
  throw ArgumentError("no axis labelled '" + label + "'");
}

bool JointPmf::has_axis(const std::string& label) const {
  return std::any_of(axes_.begin(), axes_.end(), [&](const Alphabet& a) { return a.label == label; });
}

AxisSet JointPmf::axes_of(std::initializer_list<std::string> labels) const {
  return axes_of(std::vector<std::string>(labels));
}

AxisSet JointPmf::axes_of(const std::vector<std::string>& labels) const {
  AxisSet out;
  for (const auto& l : labels) out.push_back(axis(l));
  return out;
}

std::size_t JointPmf::cell_index(const std::vector<std::size_t>& coords) const {
  if (coords.size() != axes_.size()) throw ArgumentError("coordinate rank mismatch");
  std::size_t idx = 0;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (coords[i] >= axes_[i].size) throw ArgumentError("coordinate out of range");
    idx += coords[i] * strides_[i];
  }
  return idx;
}

std::vector<std::size_t> JointPmf::coords_of(std::size_t cell) const {
  std::vector<std::size_t> c(axes_.size());
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    c[i] = cell / strides_[i];
    cell %= strides_[i];
  }
  return c;
}

Pmf make_pmf(const std::string& label, std::vector<double> weights) {
  std::size_t n = weights.size();
  return JointPmf({{label, n}}, std::move(weights));
}

CondPmf::CondPmf(std::vector<Alphabet> from, std::vector<Alphabet> to, std::vector<double> rows)
    : from_(std::move(from)), to_(std::move(to)), rows_(std::move(rows)) {
  if (to_.empty()) throw ArgumentError("conditional pmf needs at least one output axis");
  from_size_ = product_of(from_);
  to_size_ = product_of(to_);
  if (rows_.size() != from_size_ * to_size_)
    throw ArgumentError("conditional table has " + std::to_string(rows_.size()) + " entries, expected " +
                        std::to_string(from_size_ * to_size_));
  for (std::size_t r = 0; r < from_size_; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < to_size_; ++c) {
      double v = rows_[r * to_size_ + c];
      if (!(v >= 0.0) || !std::isfinite(v)) throw ArgumentError("negative or non-finite probability");
      s += v;
    }
    if (std::abs(s - 1.0) > kNormTol)
      throw ArgumentError("row " + std::to_string(r) + " sums to " + std::to_string(s) + ", not 1");
  }
}

double entropy(const JointPmf& p, const AxisSet& vars, const AxisSet& given) {
  check_axis_set(vars, p.rank(), "entropy vars");
  check_axis_set(given, p.rank(), "entropy given");
  check_disjoint(vars, given);
  if (vars.empty()) return 0.0;
  AxisSet all = given;
  all.insert(all.end(), vars.begin(), vars.end());
  auto sz = p.sizes();
  double h = entropy_of_table(marginal_table(p.weights(), sz, all));
  if (!given.empty()) h -= entropy_of_table(marginal_table(p.weights(), sz, given));
  return h;
}

double mutual_information(const JointPmf& p, const AxisSet& a, const AxisSet& b, const AxisSet& given) {
  check_disjoint(a, b);
  check_disjoint(a, given);
  check_disjoint(b, given);
  AxisSet bg = b;
  bg.insert(bg.end(), given.begin(), given.end());
  return entropy(p, a, given) - entropy(p, a, bg);
}

double kl_divergence(const JointPmf& p, const JointPmf& q) {
  check_same_axes(p, q);
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double a = p[i];
    if (a <= 0.0) continue;
    double b = q[i];
    if (b <= 0.0) return kInf;
    d += a * std::log2(a / b);
  }
  return d;
}

double tv_distance(const JointPmf& p, const JointPmf& q) {
  check_same_axes(p, q);
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

JointPmf marginalize(const JointPmf& p, const AxisSet& keep) {
  if (keep.empty()) throw ArgumentError("marginalize: keep set is empty");
  check_axis_set(keep, p.rank(), "marginalize");
  std::vector<Alphabet> axes;
  for (auto k : keep) axes.push_back(p.axes()[k]);
  return JointPmf::normalized(std::move(axes), marginal_table(p.weights(), p.sizes(), keep));
}

JointPmf marginalize(const JointPmf& p, const std::vector<std::string>& keep) {
  return marginalize(p, p.axes_of(keep));
}

JointPmf compose(const JointPmf& p, const CondPmf& c) {
  AxisSet from;
  for (const auto& a : c.from_axes()) {
    std::size_t ax = p.axis(a.label);
    if (p.axes()[ax].size != a.size) throw ArgumentError("compose: size mismatch on axis '" + a.label + "'");
    from.push_back(ax);
  }
  for (const auto& a : c.to_axes())
    if (p.has_axis(a.label)) throw ArgumentError("compose: output axis '" + a.label + "' already present");

  std::vector<Alphabet> axes = p.axes();
  axes.insert(axes.end(), c.to_axes().begin(), c.to_axes().end());
  std::vector<std::size_t> from_sizes;
  for (auto f : from) from_sizes.push_back(p.axes()[f].size);
  auto fst = row_major_strides(from_sizes);

  const std::size_t m = c.to_size();
  std::vector<double> w(p.size() * m, 0.0);
  for (std::size_t cell = 0; cell < p.size(); ++cell) {
    double pv = p[cell];
    if (pv == 0.0) continue;
    std::size_t row = 0;
    for (std::size_t i = 0; i < from.size(); ++i) row += (cell / p.strides()[from[i]] % from_sizes[i]) * fst[i];
    for (std::size_t b = 0; b < m; ++b) w[cell * m + b] = pv * c(row, b);
  }
  return JointPmf::normalized(std::move(axes), std::move(w));
}

JointPmf product(const JointPmf& a, const JointPmf& b) {
  std::vector<Alphabet> axes = a.axes();
  axes.insert(axes.end(), b.axes().begin(), b.axes().end());
  std::vector<double> w(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) w[i * b.size() + j] = a[i] * b[j];
  return JointPmf::normalized(std::move(axes), std::move(w));
}

CondPmf conditional(const JointPmf& p, const AxisSet& from, const AxisSet& to) {
  check_disjoint(from, to);
  if (to.empty()) throw ArgumentError("conditional: empty output set");
  AxisSet all = from;
  all.insert(all.end(), to.begin(), to.end());
  check_axis_set(all, p.rank(), "conditional");
  auto joint = marginal_table(p.weights(), p.sizes(), all);
  std::vector<Alphabet> fa, ta;
  std::size_t tn = 1;
  for (auto f : from) fa.push_back(p.axes()[f]);
  for (auto t : to) {
    ta.push_back(p.axes()[t]);
    tn *= p.axes()[t].size;
  }
  std::size_t fn = joint.size() / tn;
  for (std::size_t r = 0; r < fn; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < tn; ++c) s += joint[r * tn + c];
    for (std::size_t c = 0; c < tn; ++c) joint[r * tn + c] = s > 0.0 ? joint[r * tn + c] / s : 1.0 / tn;
    // Re-close the row exactly so the validating constructor accepts it.
    double t = 0.0;
    for (std::size_t c = 0; c + 1 < tn; ++c) t += joint[r * tn + c];
    joint[r * tn + tn - 1] = std::max(0.0, 1.0 - t);
  }
  return CondPmf(std::move(fa), std::move(ta), std::move(joint));
}

double entropy_continuity_bound(double theta, std::size_t out_alphabet_size, bool conditional) {
  if (out_alphabet_size == 0) throw ArgumentError("alphabet size must be positive");
  const double k = static_cast<double>(out_alphabet_size);
  if (conditional) {
    if (!(theta > 0.0 && theta <= 1.0 / (2.0 * std::exp(1.0))))
      throw ArgumentError("conditional continuity bound needs 0 < theta <= 1/(2e)");
    return -5.0 * theta * std::log2(4.0 * theta / k);
  }
  if (!(theta > 0.0 && theta <= 0.25)) throw ArgumentError("continuity bound needs 0 < theta <= 1/4");
  return -2.0 * theta * std::log2(2.0 * theta / k);
}

}  // namespace gwht
