#include "gwht/serialize.hpp"

#include <cmath>

#include "gwht/errors.hpp"

namespace gwht {

json number_to_json(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double number_from_json(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    auto s = j.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    if (s == "nan") return std::nan("");
  }
  throw ArgumentError("expected a number, got " + j.dump());
}

namespace {

json axes_json(const std::vector<Alphabet>& axes) {
  json a = json::array();
  for (const auto& x : axes) a.push_back({{"label", x.label}, {"size", x.size}});
  return a;
}

std::vector<Alphabet> axes_from(const json& j) {
  if (!j.is_array()) throw ArgumentError("axes must be an array");
  std::vector<Alphabet> out;
  for (const auto& a : j) out.push_back(Alphabet{a.at("label").get<std::string>(), a.at("size").get<std::size_t>()});
  return out;
}

std::vector<double> numbers(const json& j) {
  if (!j.is_array()) throw ArgumentError("expected an array of numbers");
  std::vector<double> v;
  v.reserve(j.size());
  for (const auto& e : j) v.push_back(number_from_json(e));
  return v;
}

json region_line(const Inequality& q) {
  return {{"name", q.name},           {"lhs", number_to_json(q.lhs)},
          {"rhs", number_to_json(q.rhs)}, {"margin", number_to_json(q.margin)},
          {"satisfied", q.satisfied}, {"interpreted", q.interpreted}};
}

}  // namespace

json to_json(const JointPmf& p) { return {{"axes", axes_json(p.axes())}, {"weights", p.weights()}}; }

JointPmf joint_pmf_from_json(const json& j) { return JointPmf(axes_from(j.at("axes")), numbers(j.at("weights"))); }

json to_json(const CondPmf& c) {
  return {{"from", axes_json(c.from_axes())}, {"to", axes_json(c.to_axes())}, {"rows", c.rows()}};
}

CondPmf cond_pmf_from_json(const json& j) {
  return CondPmf(axes_from(j.at("from")), axes_from(j.at("to")), numbers(j.at("rows")));
}

json to_json(const NType& t) {
  return {{"alphabet", {{"label", t.alphabet.label}, {"size", t.alphabet.size}}}, {"n", t.n}, {"counts", t.counts}};
}

NType ntype_from_json(const json& j) {
  NType t{Alphabet{j.at("alphabet").at("label").get<std::string>(), j.at("alphabet").at("size").get<std::size_t>()},
          j.at("counts").get<std::vector<std::uint32_t>>(), j.at("n").get<std::uint32_t>()};
  std::uint64_t s = 0;
  for (auto c : t.counts) s += c;
  if (t.counts.size() != t.alphabet.size || s != t.n) throw ArgumentError("inconsistent n-type");
  return t;
}

json to_json(const JointNType& t) { return {{"axes", axes_json(t.axes)}, {"n", t.n}, {"counts", t.counts}}; }

json to_json(const Sequence& s) {
  return {{"alphabet", {{"label", s.alphabet.label}, {"size", s.alphabet.size}}}, {"symbols", s.symbols}};
}

Sequence sequence_from_json(const json& j) {
  Sequence s{Alphabet{j.at("alphabet").at("label").get<std::string>(), j.at("alphabet").at("size").get<std::size_t>()},
             j.at("symbols").get<std::vector<std::uint32_t>>()};
  for (auto v : s.symbols)
    if (v >= s.alphabet.size) throw ArgumentError("symbol out of alphabet range");
  return s;
}

json to_json(const RateVector& r) {
  return {{"R", {r.R[0], r.R[1], r.R[2]}}, {"Rt", {r.Rt[0], r.Rt[1], r.Rt[2]}}};
}

RateVector rates_from_json(const json& j) {
  RateVector r;
  auto R = numbers(j.at("R"));
  auto Rt = numbers(j.at("Rt"));
  if (R.size() != 3 || Rt.size() != 3) throw ArgumentError("rates need three entries each for R and Rt");
  for (int i = 0; i < 3; ++i) {
    r.R[i] = R[i];
    r.Rt[i] = Rt[i];
  }
  return r;
}

json to_json(const ExponentValue& v) {
  json j = {{"value", number_to_json(v.value)},
            {"divergence", number_to_json(v.divergence)},
            {"extra", number_to_json(v.extra)},
            {"correction", number_to_json(v.correction)},
            {"feasible", v.feasible},
            {"iterations", v.solver.iterations},
            {"gap_estimate", number_to_json(v.solver.gap_estimate)},
            {"constraint_residual", number_to_json(v.solver.constraint_residual)}};
  if (!v.diagnostic.empty()) j["diagnostic"] = v.diagnostic;
  return j;
}

json to_json(const ExponentReport& r) {
  json j = {{"j", r.j},
            {"e0", number_to_json(r.e0)},
            {"e1", number_to_json(r.e1)},
            {"e2", number_to_json(r.e2)},
            {"theta_star", number_to_json(r.theta_star)},
            {"argmin_exponent", r.argmin_exponent},
            {"binning_ok", r.binning_ok},
            {"E0", to_json(r.v0)},
            {"E1", to_json(r.v1)},
            {"E2", to_json(r.v2)}};
  if (r.n) j["n"] = *r.n;
  if (r.argmin_pi.size() > 0) j["argmin_pi"] = to_json(r.argmin_pi);
  return j;
}

json to_json(const RegionReport& r) {
  json lines = json::array();
  for (const auto& q : r.lines) lines.push_back(region_line(q));
  return {{"all_satisfied", r.all_satisfied()}, {"lines", lines}};
}

json to_json(const ErrorReport& r) {
  return {{"n", r.n},
          {"trials", r.trials},
          {"alpha", {number_to_json(r.alpha[1]), number_to_json(r.alpha[2])}},
          {"alpha_stderr", {number_to_json(r.alpha_se[1]), number_to_json(r.alpha_se[2])}},
          {"beta", {number_to_json(r.beta[1]), number_to_json(r.beta[2])}},
          {"beta_stderr", {number_to_json(r.beta_se[1]), number_to_json(r.beta_se[2])}},
          {"aborts", {r.aborts[0], r.aborts[1]}},
          {"witness_violations", {r.witness_violations[1], r.witness_violations[2]}}};
}

json to_json(const Transcript& t) {
  return {{"x", to_json(t.x)},
          {"y", {to_json(t.y0), to_json(t.y1), to_json(t.y2)}},
          {"m", t.m},
          {"f", t.f},
          {"type_index", to_json(t.type_index)}};
}

json to_json(const CorrectionTerms& c) {
  json d = json::object();
  for (const auto& [mask, v] : c.delta_n) d[std::to_string(mask)] = v;
  return {{"eps_n", c.eps_n}, {"delta_n", d}};
}

}  // namespace gwht
