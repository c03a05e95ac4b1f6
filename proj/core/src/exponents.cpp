#include "gwht/exponents.hpp"

#include <algorithm>
#include <cmath>

#include "gwht/errors.hpp"
#include "gwht/osrb.hpp"

namespace gwht {

namespace {

void check_j(int j) {
  if (j != 1 && j != 2) throw ArgumentError("detector index must be 1 or 2");
}

// pi axes: 0 X, 1 Y0, 2 Y1, 3 Y2, 4 Zj.
constexpr std::size_t kX = 0, kZ = 4;
constexpr std::size_t kY(int i) { return 1 + static_cast<std::size_t>(i); }

AxisSet y_axes(std::initializer_list<int> idx) {
  AxisSet a;
  for (int i : idx) a.push_back(kY(i));
  return a;
}

KlProblem base_problem(const HypothesisPair& hyp, const CondPmf& chan, int j, JointPmf& null_out) {
  check_j(j);
  validate_hypotheses(hyp);
  validate_channel(hyp.p, chan);
  null_out = null_joint(hyp.p, chan, j);
  JointPmf ref = reference_joint(hyp.q, chan, j);
  KlProblem prob;
  prob.sizes = ref.sizes();
  prob.reference = ref.weights();
  prob.center = null_out.weights();
  return prob;
}

MarginalConstraint constraint_from(const JointPmf& target_joint, const AxisSet& axes) {
  return MarginalConstraint{axes, marginal_table(target_joint.weights(), target_joint.sizes(), axes)};
}

ExponentValue finish(const SolveResult& r, const JointPmf& shape_like, const std::string& what) {
  ExponentValue v;
  v.solver = r;
  v.feasible = r.feasible;
  if (!r.feasible) {
    v.diagnostic = what + ": " + r.diagnostic;
    return v;
  }
  v.value = r.value;
  v.divergence = r.divergence;
  v.extra = r.bracket;
  v.argmin = JointPmf::normalized(shape_like.axes(), r.argmin);
  return v;
}

}  // namespace

void validate_hypotheses(const HypothesisPair& hyp) {
  for (const auto* l : {&labels::X, &labels::Z[1], &labels::Z[2]}) {
    if (!hyp.p.has_axis(*l)) throw ArgumentError("null pmf lacks axis '" + *l + "'");
    if (!hyp.q.has_axis(*l)) throw ArgumentError("alternative pmf lacks axis '" + *l + "'");
  }
  auto px = marginalize(hyp.p, std::vector<std::string>{labels::X});
  auto qx = marginalize(hyp.q, std::vector<std::string>{labels::X});
  if (px.size() != qx.size()) throw ArgumentError("X alphabets differ between hypotheses");
  for (std::size_t i = 0; i < px.size(); ++i)
    if (std::abs(px[i] - qx[i]) > 1e-9) throw ArgumentError("marginal mismatch: p_X != q_X");
}

void validate_channel(const JointPmf& source, const CondPmf& chan) {
  if (chan.from_axes().size() != 1 || chan.from_axes()[0].label != labels::X)
    throw ArgumentError("channel must be conditioned on X alone");
  if (chan.from_axes()[0].size != source.axes()[source.axis(labels::X)].size)
    throw ArgumentError("channel input size differs from |X|");
  if (chan.to_axes().size() != 3) throw ArgumentError("channel must output Y0, Y1, Y2");
  for (int i = 0; i < 3; ++i)
    if (chan.to_axes()[i].label != labels::Y[i]) throw ArgumentError("channel outputs must be labelled Y0, Y1, Y2");
}

JointPmf null_joint(const JointPmf& p, const CondPmf& chan, int j) {
  check_j(j);
  auto xz = marginalize(p, std::vector<std::string>{labels::X, labels::Z[j]});
  auto full = compose(xz, chan);
  return marginalize(full, std::vector<std::string>{labels::X, labels::Y[0], labels::Y[1], labels::Y[2], labels::Z[j]});
}

JointPmf reference_joint(const JointPmf& q, const CondPmf& chan, int j) { return null_joint(q, chan, j); }

ExponentValue exponent_E0(const HypothesisPair& hyp, const CondPmf& chan, int j, const ExponentOptions& opts) {
  JointPmf P;
  KlProblem prob = base_problem(hyp, chan, j, P);
  prob.constraints.push_back(constraint_from(P, {kX, kY(0), kY(1), kY(2)}));
  prob.constraints.push_back(constraint_from(P, {kY(0), kY(j), kZ}));
  ExponentValue v = finish(solve_i_projection(prob, opts.solver), P, "E0");
  if (opts.n && v.feasible) {
    v.correction = nu_term(*opts.n, hyp.p, chan, j);
    v.value -= v.correction;
  }
  return v;
}

double rate_surplus(const JointPmf& p, const CondPmf& chan, const RateVector& rates, int j) {
  check_j(j);
  JointPmf P = null_joint(p, chan, j);
  const double a0 = rates.R[0] + rates.Rt[0];
  const double aj = rates.R[j] + rates.Rt[j];
  double s0 = a0 - entropy(P, y_axes({0}), {kZ, kY(j)});
  double sj = aj - entropy(P, y_axes({j}), {kZ, kY(0)});
  double s0j = a0 + aj - entropy(P, {kY(0), kY(j)}, {kZ});
  return std::min({s0, sj, s0j});
}

ExponentValue exponent_E1(const HypothesisPair& hyp, const CondPmf& chan, const RateVector& rates, int j,
                          const ExponentOptions& opts) {
  JointPmf P;
  KlProblem prob = base_problem(hyp, chan, j, P);
  prob.constraints.push_back(constraint_from(P, {kX, kY(0), kY(1), kY(2)}));
  prob.constraints.push_back(constraint_from(P, {kZ}));
  ExponentValue v = finish(solve_i_projection(prob, opts.solver), P, "E1");
  if (!v.feasible) return v;
  v.extra = rate_surplus(hyp.p, chan, rates, j);
  v.value = v.divergence + v.extra;
  if (opts.n) {
    v.correction = kappa_term(*opts.n, hyp.p, chan, j, opts.eta_n);
    v.value -= v.correction;
  }
  return v;
}

ExponentValue exponent_E2(const HypothesisPair& hyp, const CondPmf& chan, const RateVector& rates, int j,
                          const ExponentOptions& opts) {
  JointPmf P;
  KlProblem prob = base_problem(hyp, chan, j, P);
  prob.constraints.push_back(constraint_from(P, {kZ}));
  std::optional<CorrectionTerms> corr;
  if (opts.n) {
    std::vector<std::size_t> ysz;
    for (int i = 0; i < 3; ++i) ysz.push_back(chan.to_axes()[i].size);
    corr = correction_terms(chan.from_axes()[0].size, ysz, *opts.n);
  }
  for (unsigned mask = 1; mask < 8; ++mask) {
    BracketTerm t;
    t.given = {kX};
    for (int i = 0; i < 3; ++i)
      if (mask & (1u << i)) {
        t.vars.push_back(kY(i));
        t.offset += rates.Rt[i];
      }
    if (corr) t.offset += corr->delta_n.at(mask);
    prob.bracket.push_back(t);
  }
  ExponentValue v = finish(solve_kl_problem(prob, opts.solver), P, "E2");
  if (corr && v.feasible) {
    v.correction = corr->eps_n;
    v.value -= v.correction;
  }
  return v;
}

ExponentReport theta_star(const HypothesisPair& hyp, const CondPmf& chan, const RateVector& rates, int j,
                          const ExponentOptions& opts) {
  ExponentReport rep;
  rep.j = j;
  rep.n = opts.n;
  rep.v0 = exponent_E0(hyp, chan, j, opts);
  rep.v1 = exponent_E1(hyp, chan, rates, j, opts);
  rep.v2 = exponent_E2(hyp, chan, rates, j, opts);
  rep.e0 = rep.v0.value;
  rep.e1 = rep.v1.value;
  rep.e2 = rep.v2.value;
  const ExponentValue* vs[3] = {&rep.v0, &rep.v1, &rep.v2};
  rep.argmin_exponent = 0;
  for (int k = 1; k < 3; ++k)
    if (vs[k]->value < vs[rep.argmin_exponent]->value) rep.argmin_exponent = k;
  rep.theta_star = std::min({rep.e0, rep.e1, rep.e2});
  if (vs[rep.argmin_exponent]->feasible) rep.argmin_pi = vs[rep.argmin_exponent]->argmin;
  rep.binning_ok = check_binning_conditions(rates, hyp.p, chan, j).all_satisfied();
  return rep;
}

double nu_term(std::size_t n, const JointPmf& p, const CondPmf& chan, int j) {
  if (n == 0) throw ArgumentError("blocklength must be >= 1");
  check_j(j);
  double card = static_cast<double>(chan.from_axes()[0].size) * static_cast<double>(chan.to_size()) *
                static_cast<double>(p.axes()[p.axis(labels::Z[j])].size);
  return std::log2(static_cast<double>(n) + 1.0) / static_cast<double>(n) * card;
}

double kappa_term(std::size_t n, const JointPmf& p, const CondPmf& chan, int j, double eta_n) {
  return std::log2(3.0) / static_cast<double>(n) + nu_term(n, p, chan, j) + eta_n;
}

bool RegionReport::all_satisfied() const {
  return std::all_of(lines.begin(), lines.end(), [](const Inequality& l) { return l.satisfied; });
}

namespace {

Inequality greater(std::string name, double lhs, double rhs, bool interpreted = false) {
  Inequality q{std::move(name), lhs, rhs, lhs - rhs, false, interpreted};
  q.satisfied = q.margin > kMarginTol;
  return q;
}

Inequality less(std::string name, double lhs, double rhs) {
  Inequality q{std::move(name), lhs, rhs, rhs - lhs, false, false};
  q.satisfied = q.margin > kMarginTol;
  return q;
}

// Full joint over X, Z1, Z2, Y0, Y1, Y2 with named lookups.
struct Joint {
  JointPmf j;
  explicit Joint(const JointPmf& p, const CondPmf& chan) {
    validate_channel(p, chan);
    auto xz = marginalize(p, std::vector<std::string>{labels::X, labels::Z[1], labels::Z[2]});
    j = compose(xz, chan);
  }
  AxisSet ax(std::initializer_list<std::string> l) const { return j.axes_of(l); }
  double I(std::initializer_list<std::string> a, std::initializer_list<std::string> b,
           std::initializer_list<std::string> c = {}) const {
    return mutual_information(j, ax(a), ax(b), ax(c));
  }
  double H(std::initializer_list<std::string> a, std::initializer_list<std::string> c = {}) const {
    return entropy(j, ax(a), ax(c));
  }
};

}  // namespace

RegionReport check_rate_region(const RateVector& rates, const JointPmf& p, const CondPmf& chan) {
  Joint J(p, chan);
  const auto &X = labels::X, &Y0 = labels::Y[0], &Y1 = labels::Y[1], &Y2 = labels::Y[2], &Z1 = labels::Z[1],
             &Z2 = labels::Z[2];
  const double R0 = rates.R[0], R1 = rates.R[1], R2 = rates.R[2];
  const double ix0_z1 = J.I({X}, {Y0}, {Z1}), ix0_z2 = J.I({X}, {Y0}, {Z2});
  const double i01_z1 = J.I({Y0}, {Y1}, {Z1}), i02_z2 = J.I({Y0}, {Y2}, {Z2});
  const double ix1 = J.I({X}, {Y1}, {Y0, Z1}), ix2 = J.I({X}, {Y2}, {Y0, Z2});
  const double i12 = J.I({Y1}, {Y2}, {X, Y0});

  RegionReport r;
  r.lines.push_back(greater("R0 > I(X;Y0|Z1) - I(Y0;Y1|Z1)", R0, ix0_z1 - i01_z1, true));
  r.lines.push_back(greater("R0 > I(X;Y0|Z2) - I(Y0;Y2|Z2)", R0, ix0_z2 - i02_z2, true));
  r.lines.push_back(greater("R1 > I(X;Y1|Z1) - I(Y0;Y1|Z1)", R1, J.I({X}, {Y1}, {Z1}) - i01_z1, true));
  r.lines.push_back(greater("R2 > I(X;Y2|Z2) - I(Y0;Y2|Z2)", R2, J.I({X}, {Y2}, {Z2}) - i02_z2, true));
  r.lines.push_back(greater("R0+R1 > I(X;Y0Y1|Z1)", R0 + R1, J.I({X}, {Y0, Y1}, {Z1})));
  r.lines.push_back(greater("R0+R2 > I(X;Y0Y2|Z2)", R0 + R2, J.I({X}, {Y0, Y2}, {Z2})));
  r.lines.push_back(greater("R0+R1 > I(X;Y0|Z2) + I(X;Y1|Y0Z1) - I(Y0;Y2|Z2)", R0 + R1, ix0_z2 + ix1 - i02_z2));
  r.lines.push_back(greater("R0+R2 > I(X;Y0|Z1) + I(X;Y2|Y0Z2) - I(Y0;Y1|Z1)", R0 + R2, ix0_z1 + ix2 - i01_z1));
  r.lines.push_back(greater("R1+R2 > I(X;Y1|Y0Z1) + I(X;Y2|Y0Z2) + I(Y1;Y2|XY0) - I(Y1Y2;Y0|X)", R1 + R2,
                            ix1 + ix2 + i12 - J.I({Y1, Y2}, {Y0}, {X})));
  r.lines.push_back(greater("R0+R1+R2 > I(X;Y1|Y0Z1) + I(X;Y2|Y0Z2) + max_i I(Y0;X|Zi) + I(Y1;Y2|XY0)",
                            R0 + R1 + R2, ix1 + ix2 + std::max(ix0_z1, ix0_z2) + i12));
  r.lines.push_back(greater("2R0+R1+R2 > I(X;Y1|Y0Z1) + I(X;Y2|Y0Z2) + I(Y0;X|Z1) + I(Y0;X|Z2) + I(Y1;Y2|XY0)",
                            2 * R0 + R1 + R2, ix1 + ix2 + ix0_z1 + ix0_z2 + i12));
  return r;
}

RegionReport check_tilde_region(const RateVector& rates, const JointPmf& p, const CondPmf& chan) {
  Joint J(p, chan);
  RegionReport r;
  for (unsigned mask = 1; mask < 8; ++mask) {
    std::vector<std::string> ys;
    std::string lhs_name, rhs_name;
    double lhs = 0.0;
    for (int i = 0; i < 3; ++i)
      if (mask & (1u << i)) {
        ys.push_back(labels::Y[i]);
        lhs += rates.Rt[i];
        lhs_name += (lhs_name.empty() ? "" : "+") + std::string("Rt") + std::to_string(i);
        rhs_name += labels::Y[i];
      }
    double h = entropy(J.j, J.j.axes_of(ys), J.j.axes_of({labels::X}));
    r.lines.push_back(less(lhs_name + " < H(" + rhs_name + "|X)", lhs, h));
  }
  return r;
}

RegionReport check_binning_conditions(const RateVector& rates, const JointPmf& p, const CondPmf& chan, int j) {
  check_j(j);
  Joint J(p, chan);
  const auto& Y0 = labels::Y[0];
  const auto& Yj = labels::Y[j];
  const auto& Zj = labels::Z[j];
  const std::string js = std::to_string(j);
  const double a0 = rates.R[0] + rates.Rt[0], aj = rates.R[j] + rates.Rt[j];
  RegionReport r;
  r.lines.push_back(greater("R0+Rt0 > H(Y0|Y" + js + " Z" + js + ")", a0, J.H({Y0}, {Yj, Zj})));
  r.lines.push_back(greater("R" + js + "+Rt" + js + " > H(Y" + js + "|Y0 Z" + js + ")", aj, J.H({Yj}, {Y0, Zj})));
  r.lines.push_back(greater("R0+Rt0+R" + js + "+Rt" + js + " > H(Y0 Y" + js + "|Z" + js + ")", a0 + aj,
                            J.H({Y0, Yj}, {Zj})));
  return r;
}

double privacy_bound(const JointPmf& source, const CondPmf& chan, int i) {
  check_j(i);
  validate_channel(source, chan);
  auto xzs = marginalize(source, std::vector<std::string>{labels::X, labels::Z[i], labels::S[i]});
  auto full = compose(xzs, chan);
  return entropy(full, full.axes_of({labels::S[i]}), full.axes_of({labels::Z[i], labels::Y[0], labels::Y[i]}));
}

}  // namespace gwht
