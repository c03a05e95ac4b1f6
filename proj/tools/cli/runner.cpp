#include "runner.hpp"

#include <cmath>
#include <ostream>

#include "gwht/errors.hpp"
#include "gwht/osrb.hpp"
#include "gwht/parallel.hpp"
#include "records.hpp"

namespace gwht::cli {

namespace {

json num(double v) { return number_to_json(v); }

void put_rates(json& r, const RateVector& rates) {
  for (int i = 0; i < 3; ++i) {
    r["R" + std::to_string(i)] = rates.R[i];
    r["Rt" + std::to_string(i)] = rates.Rt[i];
  }
}

HypothesisPair hypotheses(const ProtocolConfig& c) {
  const std::vector<std::string> xz{labels::X, labels::Z[1], labels::Z[2]};
  return {marginalize(c.source, xz), marginalize(c.alt, xz)};
}

// Runs fn over the indices in parallel and concatenates the per-index records in order.
template <class F>
std::vector<json> ordered(std::size_t count, std::size_t workers, F fn) {
  std::vector<std::vector<json>> slots(count);
  parallel_for(count, workers, [&](std::size_t k) { slots[k] = fn(k); });
  std::vector<json> out;
  for (auto& s : slots)
    for (auto& r : s) out.push_back(std::move(r));
  return out;
}

// One record per sweep point; detector-specific fields carry a _j suffix.
std::vector<json> exponents(const ExperimentConfig& cfg) {
  auto pts = cfg.points();
  return ordered(pts.size(), cfg.workers, [&](std::size_t k) {
    const auto& pt = pts[k];
    ProtocolConfig pc = cfg.at(pt);
    auto hyp = hypotheses(pc);
    ExponentOptions opts;
    if (cfg.finite_n) opts.n = pt.n;
    json r;
    r["point"] = k;
    r["n"] = cfg.finite_n ? json(pt.n) : json("inf");
    put_rates(r, pc.rates);
    bool feasible = true;
    for (int j : cfg.detectors) {
      auto rep = theta_star(hyp, pc.chan, pc.rates, j, opts);
      const std::string sfx = "_" + std::to_string(j);
      r["e0" + sfx] = num(rep.e0);
      r["e1" + sfx] = num(rep.e1);
      r["e2" + sfx] = num(rep.e2);
      r["theta_star" + sfx] = num(rep.theta_star);
      r["argmin" + sfx] = rep.argmin_exponent;
      r["e2_gap" + sfx] = num(rep.v2.solver.gap_estimate);
      r["binning_ok" + sfx] = rep.binning_ok;
      feasible = feasible && rep.v0.feasible && rep.v1.feasible && rep.v2.feasible;
    }
    r["feasible"] = feasible;
    return std::vector<json>{r};
  });
}

std::vector<json> region(const ExperimentConfig& cfg) {
  auto pts = cfg.points();
  std::vector<json> out;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    ProtocolConfig pc = cfg.at(pts[k]);
    auto emit = [&](const std::string& block, const RegionReport& rep) {
      for (const auto& l : rep.lines) {
        json r;
        r["point"] = k;
        put_rates(r, pc.rates);
        r["block"] = block;
        r["name"] = l.name;
        r["lhs"] = num(l.lhs);
        r["rhs"] = num(l.rhs);
        r["margin"] = num(l.margin);
        r["status"] = l.satisfied ? "satisfied" : "violated";
        r["interpreted"] = l.interpreted;
        out.push_back(std::move(r));
      }
    };
    emit("rate", check_rate_region(pc.rates, pc.source, pc.chan));
    emit("tilde", check_tilde_region(pc.rates, pc.source, pc.chan));
    for (int j : cfg.detectors)
      emit("binning_j" + std::to_string(j), check_binning_conditions(pc.rates, pc.source, pc.chan, j));
  }
  return out;
}

std::vector<json> osrb(const ExperimentConfig& cfg) {
  // Y0, Y1, Y2 binned at the shared-randomness rates, source p_X * channel.
  const auto& pc = cfg.protocol;
  OsrbSource src{marginalize(pc.source, std::vector<std::string>{labels::X}), pc.chan};
  std::vector<json> out;
  for (std::size_t n : cfg.osrb_n) {
    for (std::size_t k = 0; k < cfg.sweep_rates.size(); ++k) {
      const auto& rates = cfg.sweep_rates[k];
      BinningSpec spec{{rates.Rt[0], rates.Rt[1], rates.Rt[2]}, n};
      auto tv = empirical_osrb_tv(spec, src, cfg.osrb_trials, pc.seed, cfg.workers);
      auto z = zeta_exponent(spec, src.p_x, src.chan);
      json r;
      r["n"] = n;
      r["rate_point"] = k;
      for (int i = 0; i < 3; ++i) r["rate" + std::to_string(i)] = spec.rates[i];
      r["trials"] = tv.trials;
      r["measured_tv"] = num(tv.mean_tv);
      r["stderr"] = num(tv.stderr_tv);
      r["measured_exponent"] = num(tv.mean_tv > 0 ? -std::log2(tv.mean_tv) / static_cast<double>(n) : kInf);
      r["zeta"] = num(z.value);
      r["zeta_negative"] = z.negative;
      r["eps_n"] = num(z.eps_n);
      auto corr = correction_terms(src.p_x.size(), {pc.chan.to_axes()[0].size, pc.chan.to_axes()[1].size,
                                                   pc.chan.to_axes()[2].size}, n);
      r["delta_n_all"] = num(corr.delta_n.at(7));
      r["seed"] = pc.seed;
      out.push_back(std::move(r));
    }
  }
  return out;
}

std::vector<json> simulate(const ExperimentConfig& cfg) {
  auto pts = cfg.points();
  std::vector<json> out;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    ProtocolModel model(cfg.at(pts[k]));
    SimulationOptions opts;
    opts.mode = cfg.mode;
    opts.workers = cfg.workers;
    auto rep = estimate_errors(model, cfg.trials, cfg.protocol.seed, opts);
    for (int h = 0; h < 2; ++h)
      for (int j : cfg.detectors) {
        json r;
        r["point"] = k;
        r["n"] = pts[k].n;
        r["delta_c"] = pts[k].delta_c;
        r["delta_prime"] = model.delta();
        put_rates(r, pts[k].rates);
        r["mode"] = cfg.mode == ProtocolMode::A ? "A" : "B";
        r["hypothesis"] = h;
        r["detector"] = j;
        r["error"] = h == 0 ? "alpha" : "beta";
        r["trials"] = rep.trials;
        r["rate"] = num(h == 0 ? rep.alpha[j] : rep.beta[j]);
        r["stderr"] = num(h == 0 ? rep.alpha_se[j] : rep.beta_se[j]);
        r["aborts"] = rep.aborts[h];
        r["witness_violations"] = rep.witness_violations[j];
        out.push_back(std::move(r));
      }
  }
  return out;
}

std::vector<json> equivocation(const ExperimentConfig& cfg) {
  std::vector<json> out;
  for (std::size_t n : cfg.eq_n) {
    ProtocolConfig pc = cfg.protocol;
    pc.n = n;
    ProtocolModel model(pc);
    // Same binning realization as `simulate` for this seed.
    Rng rng = Rng::derive(pc.seed, {0xB1175u});
    auto bins = sample_binning(model, rng);
    for (int i : cfg.detectors) {
      double v = estimate_equivocation(model, bins, i, cfg.eq_mode, cfg.eq_trials, pc.seed, cfg.mode);
      json r;
      r["n"] = n;
      r["i"] = i;
      r["mode"] = cfg.eq_mode == EquivocationMode::Exact ? "exact" : "plugin";
      r["protocol"] = cfg.mode == ProtocolMode::A ? "A" : "B";
      r["equivocation"] = num(v);
      r["privacy_bound"] = num(privacy_bound(pc.source, pc.chan, i));
      r["H_S"] = num(entropy(pc.source, pc.source.axes_of({labels::S[i]})));
      if (cfg.eq_mode == EquivocationMode::Plugin) r["trials"] = cfg.eq_trials;
      out.push_back(std::move(r));
    }
  }
  return out;
}

std::vector<json> duality(const ExperimentConfig& cfg) {
  std::vector<json> out;
  for (std::size_t n : cfg.duality_n) {
    ProtocolConfig pc = cfg.protocol;
    pc.n = n;
    ProtocolModel model(pc);
    std::vector<double> tv(cfg.duality_binnings);
    parallel_for(tv.size(), cfg.workers, [&](std::size_t k) {
      Rng rng = Rng::derive(pc.seed, {0xD0A1u, k});
      tv[k] = duality_tv(model, sample_binning(model, rng));
    });
    double mean = 0.0, ss = 0.0;
    for (double v : tv) mean += v;
    mean /= static_cast<double>(tv.size());
    for (double v : tv) ss += (v - mean) * (v - mean);
    double se = tv.size() > 1 ? std::sqrt(ss / static_cast<double>(tv.size() - 1) / static_cast<double>(tv.size())) : 0.0;
    json r;
    r["n"] = n;
    put_rates(r, pc.rates);
    r["binnings"] = tv.size();
    r["mean_tv"] = num(mean);
    r["stderr"] = num(se);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

std::vector<json> run_command(const std::string& command, const ExperimentConfig& cfg) {
  if (command == "exponents") return exponents(cfg);
  if (command == "region") return region(cfg);
  if (command == "osrb") return osrb(cfg);
  if (command == "simulate") return simulate(cfg);
  if (command == "equivocation") return equivocation(cfg);
  if (command == "duality") return duality(cfg);
  throw ArgumentError("unknown command '" + command + "'");
}

int run(const RunRequest& req, std::ostream& out, std::ostream& err) {
  try {
    ExperimentConfig cfg = load_config(req.config_path, req.command);
    if (req.trials) {
      cfg.trials = *req.trials;
      cfg.osrb_trials = *req.trials;
      cfg.eq_trials = *req.trials;
      cfg.duality_binnings = *req.trials;
    }
    if (req.seed) cfg.protocol.seed = *req.seed;
    if (req.workers) cfg.workers = *req.workers;
    auto records = run_command(req.command, cfg);
    if (req.out_path) write_records(*req.out_path, req.command, records);
    out << req.command << ": " << records.size() << " record(s)";
    if (req.out_path) out << " -> " << *req.out_path;
    out << "\n" << summary_table(records);
    return kExitOk;
  } catch (const ConfigErrors& e) {
    err << e.what() << "\n";
    return kExitConfig;
  } catch (const ResourceError& e) {
    err << "resource limit: " << e.what() << "\n";
    return kExitResource;
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace gwht::cli
