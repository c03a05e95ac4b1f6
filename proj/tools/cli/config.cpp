#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "gwht/errors.hpp"

namespace gwht::cli {

namespace {

const std::set<std::string> kSeeded = {"simulate", "osrb", "equivocation", "duality"};

std::string join_errors(const std::vector<ConfigError>& errs) {
  std::string s = "invalid configuration:";
  for (const auto& e : errs) {
    s += "\n  [" + e.code + "] " + (e.field.empty() ? "(document)" : e.field);
    if (e.line > 0) s += " (line " + std::to_string(e.line) + ")";
    s += ": " + e.message;
  }
  return s;
}

class Checker {
 public:
  explicit Checker(std::vector<ConfigError>& errs) : errs_(errs) {}

  void add(std::string code, std::string field, std::string msg) {
    errs_.push_back({std::move(code), std::move(field), std::move(msg), 0});
  }

  const json* member(const json& obj, const std::string& key, const std::string& ptr, bool required) {
    if (!obj.is_object()) return nullptr;
    auto it = obj.find(key);
    if (it == obj.end()) {
      if (required) add("MISSING_FIELD", ptr, "required field is missing");
      return nullptr;
    }
    return &*it;
  }

  std::optional<double> number(const json& v, const std::string& ptr) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
      try {
        return number_from_json(v);
      } catch (const std::exception&) {
      }
    }
    add("TYPE", ptr, "expected a number");
    return std::nullopt;
  }

  std::optional<std::uint64_t> uinteger(const json& v, const std::string& ptr, std::uint64_t min) {
    if (v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      auto x = v.get<std::uint64_t>();
      if (x < min) {
        add("RANGE", ptr, "must be >= " + std::to_string(min));
        return std::nullopt;
      }
      return x;
    }
    if (v.is_number_integer()) {
      add("RANGE", ptr, "must be a non-negative integer");
      return std::nullopt;
    }
    add("TYPE", ptr, "expected an integer");
    return std::nullopt;
  }

  std::optional<double> positive(const json& v, const std::string& ptr) {
    auto x = number(v, ptr);
    if (x && !(*x > 0.0 && std::isfinite(*x))) {
      add("RANGE", ptr, "must be a positive finite number");
      return std::nullopt;
    }
    return x;
  }

  std::optional<std::vector<Alphabet>> axes(const json& v, const std::string& ptr) {
    if (!v.is_array()) {
      add("TYPE", ptr, "expected an array of {label, size}");
      return std::nullopt;
    }
    std::vector<Alphabet> out;
    std::set<std::string> seen;
    bool ok = true;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string p = ptr + "/" + std::to_string(i);
      const json& a = v[i];
      const json* label = member(a, "label", p + "/label", true);
      const json* size = member(a, "size", p + "/size", true);
      if (!a.is_object()) {
        add("TYPE", p, "expected {label, size}");
        ok = false;
        continue;
      }
      if (!label || !size) {
        ok = false;
        continue;
      }
      if (!label->is_string()) {
        add("TYPE", p + "/label", "expected a string");
        ok = false;
        continue;
      }
      auto sz = uinteger(*size, p + "/size", 1);
      if (!sz) {
        ok = false;
        continue;
      }
      std::string l = label->get<std::string>();
      if (!seen.insert(l).second) {
        add("AXIS", p + "/label", "duplicate axis label '" + l + "'");
        ok = false;
      }
      out.push_back({l, static_cast<std::size_t>(*sz)});
    }
    if (!ok) return std::nullopt;
    if (out.empty()) {
      add("SHAPE", ptr, "at least one axis is required");
      return std::nullopt;
    }
    return out;
  }

  std::optional<std::vector<double>> weights(const json& v, const std::string& ptr, std::size_t expected) {
    if (!v.is_array()) {
      add("TYPE", ptr, "expected a flat array of numbers");
      return std::nullopt;
    }
    if (v.size() != expected) {
      add("SHAPE", ptr, "expected " + std::to_string(expected) + " entries, found " + std::to_string(v.size()));
      return std::nullopt;
    }
    std::vector<double> w;
    bool ok = true;
    for (std::size_t i = 0; i < v.size(); ++i) {
      auto x = number(v[i], ptr + "/" + std::to_string(i));
      if (!x) {
        ok = false;
        continue;
      }
      if (!(*x >= 0.0) || !std::isfinite(*x)) {
        add("RANGE", ptr + "/" + std::to_string(i), "probabilities must be finite and non-negative");
        ok = false;
      }
      w.push_back(*x);
    }
    if (!ok) return std::nullopt;
    return w;
  }

  void sum_to_one(const std::vector<double>& w, std::size_t begin, std::size_t end, const std::string& ptr,
                  const std::string& what) {
    double s = 0.0;
    for (std::size_t i = begin; i < end; ++i) s += w[i];
    if (std::abs(s - 1.0) > kNormTol) {
      std::ostringstream os;
      os.precision(15);
      os << what << " sums to " << s << ", expected 1 within " << kNormTol;
      add("NORMALIZATION", ptr, os.str());
    }
  }

  std::optional<JointPmf> pmf(const json& doc, const std::string& key, const std::vector<std::string>& required) {
    const std::string ptr = "/" + key;
    const json* v = member(doc, key, ptr, true);
    if (!v) return std::nullopt;
    if (!v->is_object()) {
      add("TYPE", ptr, "expected {axes, weights}");
      return std::nullopt;
    }
    const json* ax = member(*v, "axes", ptr + "/axes", true);
    const json* wt = member(*v, "weights", ptr + "/weights", true);
    if (!ax || !wt) return std::nullopt;
    auto a = axes(*ax, ptr + "/axes");
    if (!a) return std::nullopt;
    std::size_t cells = 1;
    for (const auto& x : *a) cells *= x.size;
    auto w = weights(*wt, ptr + "/weights", cells);
    bool ok = static_cast<bool>(w);
    for (const auto& l : required) {
      bool found = false;
      for (const auto& x : *a) found |= x.label == l;
      if (!found) {
        add("AXIS", ptr + "/axes", "axis '" + l + "' is required");
        ok = false;
      }
    }
    if (!w) return std::nullopt;
    std::size_t before = errs_.size();
    sum_to_one(*w, 0, w->size(), ptr + "/weights", "pmf");
    if (!ok || errs_.size() != before) return std::nullopt;
    return JointPmf(*a, *w);
  }

  std::optional<CondPmf> channel(const json& doc) {
    const std::string ptr = "/channel";
    const json* v = member(doc, "channel", ptr, true);
    if (!v) return std::nullopt;
    if (!v->is_object()) {
      add("TYPE", ptr, "expected {from, to, rows}");
      return std::nullopt;
    }
    const json* f = member(*v, "from", ptr + "/from", true);
    const json* t = member(*v, "to", ptr + "/to", true);
    const json* r = member(*v, "rows", ptr + "/rows", true);
    if (!f || !t || !r) return std::nullopt;
    auto from = axes(*f, ptr + "/from");
    auto to = axes(*t, ptr + "/to");
    if (!from || !to) return std::nullopt;
    bool ok = true;
    if (from->size() != 1 || (*from)[0].label != labels::X) {
      add("AXIS", ptr + "/from", "the channel input must be the single axis X");
      ok = false;
    }
    if (to->size() != 3 || (*to)[0].label != labels::Y[0] || (*to)[1].label != labels::Y[1] ||
        (*to)[2].label != labels::Y[2]) {
      add("AXIS", ptr + "/to", "the channel outputs must be Y0, Y1, Y2 in that order");
      ok = false;
    }
    std::size_t nf = 1, nt = 1;
    for (const auto& a : *from) nf *= a.size;
    for (const auto& a : *to) nt *= a.size;
    auto rows = weights(*r, ptr + "/rows", nf * nt);
    if (!rows) return std::nullopt;
    std::size_t before = errs_.size();
    for (std::size_t i = 0; i < nf; ++i) sum_to_one(*rows, i * nt, (i + 1) * nt, ptr + "/rows", "row " + std::to_string(i));
    if (!ok || errs_.size() != before) return std::nullopt;
    return CondPmf(*from, *to, *rows);
  }

  std::optional<RateVector> rates(const json& v, const std::string& ptr) {
    if (!v.is_object()) {
      add("TYPE", ptr, "expected {R: [3], Rt: [3]}");
      return std::nullopt;
    }
    RateVector out;
    bool ok = true;
    for (const char* key : {"R", "Rt"}) {
      const std::string p = ptr + "/" + key;
      const json* arr = member(v, key, p, true);
      if (!arr) {
        ok = false;
        continue;
      }
      if (!arr->is_array() || arr->size() != 3) {
        add("SHAPE", p, "expected an array of three rates");
        ok = false;
        continue;
      }
      for (std::size_t i = 0; i < 3; ++i) {
        auto x = number((*arr)[i], p + "/" + std::to_string(i));
        if (!x) {
          ok = false;
          continue;
        }
        if (!(*x >= 0.0) || !std::isfinite(*x)) {
          add("RANGE", p + "/" + std::to_string(i), "rates must be finite and non-negative");
          ok = false;
        }
        (std::string(key) == "R" ? out.R : out.Rt)[i] = *x;
      }
    }
    if (!ok) return std::nullopt;
    return out;
  }

  template <class T, class F>
  std::optional<std::vector<T>> list(const json& v, const std::string& ptr, F elem) {
    if (!v.is_array()) {
      add("TYPE", ptr, "expected an array");
      return std::nullopt;
    }
    if (v.empty()) {
      add("SWEEP_EMPTY", ptr, "sweep grids must be non-empty");
      return std::nullopt;
    }
    std::vector<T> out;
    bool ok = true;
    for (std::size_t i = 0; i < v.size(); ++i) {
      auto x = elem(v[i], ptr + "/" + std::to_string(i));
      if (!x) {
        ok = false;
        continue;
      }
      out.push_back(static_cast<T>(*x));
    }
    if (!ok) return std::nullopt;
    return out;
  }

  std::optional<std::vector<std::size_t>> blocklengths(const json& v, const std::string& ptr) {
    return list<std::size_t>(v, ptr, [&](const json& e, const std::string& p) { return uinteger(e, p, 1); });
  }

 private:
  std::vector<ConfigError>& errs_;
};

// Everything validate_config checks, plus the parsed values.
ExperimentConfig check(const json& doc, const std::string& command, std::vector<ConfigError>& errs) {
  Checker c(errs);
  ExperimentConfig cfg;
  if (!doc.is_object()) {
    c.add("TYPE", "", "the configuration must be a JSON object");
    return cfg;
  }
  const std::vector<std::string> xz{labels::X, labels::Z[1], labels::Z[2]};
  const std::vector<std::string> xzs{labels::X, labels::Z[1], labels::Z[2], labels::S[1], labels::S[2]};
  auto src = c.pmf(doc, "source", xzs);
  auto alt = c.pmf(doc, "alt", xz);
  auto chan = c.channel(doc);

  auto size_of = [](const JointPmf& p, const std::string& l) { return p.axes()[p.axis(l)].size; };
  bool sizes_ok = true;
  if (src && alt) {
    for (const auto& l : xz)
      if (size_of(*src, l) != size_of(*alt, l)) {
        c.add("ALPHABET_MISMATCH", "/alt/axes", "|" + l + "| differs from the source");
        sizes_ok = false;
      }
  }
  if (src && chan && chan->from_axes()[0].size != size_of(*src, labels::X)) {
    c.add("ALPHABET_MISMATCH", "/channel/from", "|X| differs from the source");
    sizes_ok = false;
  }
  if (src && alt && sizes_ok) {
    auto px = marginalize(*src, std::vector<std::string>{labels::X});
    auto qx = marginalize(*alt, std::vector<std::string>{labels::X});
    for (std::size_t i = 0; i < px.size(); ++i)
      if (std::abs(px[i] - qx[i]) > 1e-9) {
        c.add("MARGINAL_MISMATCH", "/alt/weights",
              "p_X and q_X differ at symbol " + std::to_string(i) + " by more than 1e-9");
        break;
      }
  }
  if (src) cfg.protocol.source = *src;
  if (alt) cfg.protocol.alt = *alt;
  if (chan) cfg.protocol.chan = *chan;

  if (const json* r = c.member(doc, "rates", "/rates", true))
    if (auto v = c.rates(*r, "/rates")) cfg.protocol.rates = *v;
  if (const json* v = c.member(doc, "n", "/n", true))
    if (auto x = c.uinteger(*v, "/n", 1)) cfg.protocol.n = *x;
  if (const json* v = c.member(doc, "delta_c", "/delta_c", false))
    if (auto x = c.positive(*v, "/delta_c")) cfg.protocol.delta_c = *x;
  if (const json* v = c.member(doc, "delta_prime", "/delta_prime", false))
    if (auto x = c.positive(*v, "/delta_prime")) cfg.protocol.delta_prime_override = *x;
  if (const json* v = c.member(doc, "budget", "/budget", false))
    if (auto x = c.positive(*v, "/budget")) cfg.protocol.budget = *x;
  const json* seed = c.member(doc, "seed", "/seed", false);
  if (seed) {
    if (auto x = c.uinteger(*seed, "/seed", 0)) cfg.protocol.seed = *x;
  } else if (kSeeded.count(command)) {
    c.add("SEED_REQUIRED", "/seed", "'" + command + "' needs an explicit seed");
  }
  if (const json* v = c.member(doc, "trials", "/trials", false))
    if (auto x = c.uinteger(*v, "/trials", 1)) cfg.trials = *x;
  if (const json* v = c.member(doc, "workers", "/workers", false))
    if (auto x = c.uinteger(*v, "/workers", 0)) cfg.workers = *x;
  if (const json* v = c.member(doc, "mode", "/mode", false)) {
    if (*v == "A")
      cfg.mode = ProtocolMode::A;
    else if (*v == "B")
      cfg.mode = ProtocolMode::B;
    else
      c.add("RANGE", "/mode", "mode must be \"A\" or \"B\"");
  }
  if (const json* v = c.member(doc, "detectors", "/detectors", false)) {
    auto d = c.list<int>(*v, "/detectors", [&](const json& e, const std::string& p) -> std::optional<std::uint64_t> {
      auto x = c.uinteger(e, p, 1);
      if (x && *x > 2) {
        c.add("RANGE", p, "detector index must be 1 or 2");
        return std::nullopt;
      }
      return x;
    });
    if (d) cfg.detectors = *d;
  }

  if (const json* sw = c.member(doc, "sweep", "/sweep", false)) {
    if (!sw->is_object()) c.add("TYPE", "/sweep", "expected an object");
    if (const json* v = c.member(*sw, "n", "/sweep/n", false))
      if (auto x = c.blocklengths(*v, "/sweep/n")) cfg.sweep_n = *x;
    if (const json* v = c.member(*sw, "delta_c", "/sweep/delta_c", false))
      if (auto x = c.list<double>(*v, "/sweep/delta_c", [&](const json& e, const std::string& p) { return c.positive(e, p); }))
        cfg.sweep_delta_c = *x;
    if (const json* v = c.member(*sw, "rates", "/sweep/rates", false))
      if (auto x = c.list<RateVector>(*v, "/sweep/rates", [&](const json& e, const std::string& p) { return c.rates(e, p); }))
        cfg.sweep_rates = *x;
  }
  if (const json* e = c.member(doc, "exponents", "/exponents", false)) {
    if (const json* v = c.member(*e, "finite_n", "/exponents/finite_n", false)) {
      if (v->is_boolean())
        cfg.finite_n = v->get<bool>();
      else
        c.add("TYPE", "/exponents/finite_n", "expected true or false");
    }
  }
  if (const json* o = c.member(doc, "osrb", "/osrb", false)) {
    if (const json* v = c.member(*o, "n", "/osrb/n", false))
      if (auto x = c.blocklengths(*v, "/osrb/n")) cfg.osrb_n = *x;
    if (const json* v = c.member(*o, "trials", "/osrb/trials", false))
      if (auto x = c.uinteger(*v, "/osrb/trials", 1)) cfg.osrb_trials = *x;
  }
  if (const json* q = c.member(doc, "equivocation", "/equivocation", false)) {
    if (const json* v = c.member(*q, "mode", "/equivocation/mode", false)) {
      if (*v == "exact")
        cfg.eq_mode = EquivocationMode::Exact;
      else if (*v == "plugin")
        cfg.eq_mode = EquivocationMode::Plugin;
      else
        c.add("RANGE", "/equivocation/mode", "mode must be \"exact\" or \"plugin\"");
    }
    if (const json* v = c.member(*q, "n", "/equivocation/n", false))
      if (auto x = c.blocklengths(*v, "/equivocation/n")) cfg.eq_n = *x;
    if (const json* v = c.member(*q, "trials", "/equivocation/trials", false))
      if (auto x = c.uinteger(*v, "/equivocation/trials", 1)) cfg.eq_trials = *x;
  }
  if (const json* d = c.member(doc, "duality", "/duality", false)) {
    if (const json* v = c.member(*d, "n", "/duality/n", false))
      if (auto x = c.blocklengths(*v, "/duality/n")) cfg.duality_n = *x;
    if (const json* v = c.member(*d, "binnings", "/duality/binnings", false))
      if (auto x = c.uinteger(*v, "/duality/binnings", 1)) cfg.duality_binnings = *x;
  }

  if (cfg.sweep_n.empty()) cfg.sweep_n = {cfg.protocol.n};
  if (cfg.sweep_delta_c.empty()) cfg.sweep_delta_c = {cfg.protocol.delta_c};
  if (cfg.sweep_rates.empty()) cfg.sweep_rates = {cfg.protocol.rates};
  if (cfg.osrb_n.empty()) cfg.osrb_n = cfg.sweep_n;
  if (cfg.eq_n.empty()) cfg.eq_n = cfg.sweep_n;
  if (cfg.duality_n.empty()) cfg.duality_n = cfg.sweep_n;
  return cfg;
}

std::pair<int, int> line_col(const std::string& text, std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

// Best-effort: walks the pointer's object keys through the text in order.
int locate(const std::string& text, const std::string& pointer) {
  std::size_t pos = 0;
  bool any = false;
  std::stringstream ss(pointer);
  std::string tok;
  while (std::getline(ss, tok, '/')) {
    if (tok.empty() || std::all_of(tok.begin(), tok.end(), ::isdigit)) continue;
    auto p = text.find("\"" + tok + "\"", pos);
    if (p == std::string::npos) break;
    pos = p;
    any = true;
  }
  return any ? line_col(text, pos).first : 0;
}

}  // namespace

ConfigErrors::ConfigErrors(std::vector<ConfigError> errors)
    : std::runtime_error(join_errors(errors)), errors_(std::move(errors)) {}

std::vector<SweepPoint> ExperimentConfig::points() const {
  std::vector<SweepPoint> out;
  for (auto n : sweep_n)
    for (double c : sweep_delta_c)
      for (const auto& r : sweep_rates) out.push_back({n, c, r});
  return out;
}

ProtocolConfig ExperimentConfig::at(const SweepPoint& p) const {
  ProtocolConfig c = protocol;
  c.n = p.n;
  c.delta_c = p.delta_c;
  c.rates = p.rates;
  return c;
}

std::vector<ConfigError> validate_config(const json& doc, const std::string& command) {
  std::vector<ConfigError> errs;
  check(doc, command, errs);
  return errs;
}

std::vector<ConfigError> validate_config_text(const std::string& text, const std::string& command) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    auto [line, col] = line_col(text, e.byte > 0 ? e.byte - 1 : 0);
    return {{"PARSE", "", "syntax error at line " + std::to_string(line) + ", column " + std::to_string(col), line}};
  }
  auto errs = validate_config(doc, command);
  for (auto& e : errs) e.line = locate(text, e.field);
  return errs;
}

ExperimentConfig parse_config(const json& doc, const std::string& command) {
  std::vector<ConfigError> errs;
  ExperimentConfig cfg = check(doc, command, errs);
  if (!errs.empty()) throw ConfigErrors(std::move(errs));
  return cfg;
}

json read_config_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigErrors({{"IO", "", "cannot open '" + path + "'", 0}});
  std::stringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  auto errs = validate_config_text(text);
  if (!errs.empty() && errs.front().code == "PARSE") throw ConfigErrors(std::move(errs));
  return json::parse(text);
}

ExperimentConfig load_config(const std::string& path, const std::string& command) {
  std::ifstream in(path);
  if (!in) throw ConfigErrors({{"IO", "", "cannot open '" + path + "'", 0}});
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  auto errs = validate_config_text(text, command);
  if (!errs.empty()) throw ConfigErrors(std::move(errs));
  return parse_config(json::parse(text), command);
}

}  // namespace gwht::cli
