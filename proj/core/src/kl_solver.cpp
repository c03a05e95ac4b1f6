#include "gwht/kl_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gwht/errors.hpp"
#include "gwht/parallel.hpp"
#include "gwht/random.hpp"

namespace gwht {

namespace {

// cell -> marginal index for an axis subset.
struct IndexMap {
  std::vector<std::uint32_t> idx;
  std::size_t size = 1;
};

IndexMap build_map(const std::vector<std::size_t>& sizes, const AxisSet& axes) {
  std::size_t total = 1;
  for (auto s : sizes) total *= s;
  auto st = row_major_strides(sizes);
  std::vector<std::size_t> sub_sizes;
  for (auto a : axes) {
    if (a >= sizes.size()) throw ArgumentError("solver: axis index out of range");
    sub_sizes.push_back(sizes[a]);
  }
  auto sst = row_major_strides(sub_sizes);
  IndexMap m;
  for (auto s : sub_sizes) m.size *= s;
  m.idx.resize(total);
  for (std::size_t c = 0; c < total; ++c) {
    std::size_t o = 0;
    for (std::size_t i = 0; i < axes.size(); ++i) o += (c / st[axes[i]] % sizes[axes[i]]) * sst[i];
    m.idx[c] = static_cast<std::uint32_t>(o);
  }
  return m;
}

std::vector<double> apply_map(const IndexMap& m, const std::vector<double>& pi) {
  std::vector<double> out(m.size, 0.0);
  for (std::size_t c = 0; c < pi.size(); ++c) out[m.idx[c]] += pi[c];
  return out;
}

struct Compiled {
  std::vector<IndexMap> cons;
  std::vector<IndexMap> joint;  // vars u given
  std::vector<IndexMap> given;
  std::vector<char> support;
};

Compiled compile(const KlProblem& prob) {
  std::size_t total = 1;
  for (auto s : prob.sizes) total *= s;
  if (prob.reference.size() != total) throw ArgumentError("solver: reference table shape mismatch");
  Compiled c;
  for (const auto& k : prob.constraints) {
    c.cons.push_back(build_map(prob.sizes, k.axes));
    if (k.target.size() != c.cons.back().size) throw ArgumentError("solver: constraint target shape mismatch");
  }
  for (const auto& t : prob.bracket) {
    AxisSet u = t.given;
    u.insert(u.end(), t.vars.begin(), t.vars.end());
    c.joint.push_back(build_map(prob.sizes, u));
    c.given.push_back(build_map(prob.sizes, t.given));
  }
  c.support.resize(total);
  for (std::size_t i = 0; i < total; ++i) c.support[i] = prob.reference[i] > 0.0;
  return c;
}

double divergence_bits(const std::vector<double>& pi, const std::vector<double>& r) {
  double d = 0.0;
  for (std::size_t i = 0; i < pi.size(); ++i) {
    if (pi[i] <= 0.0) continue;
    if (r[i] <= 0.0) return kInf;
    d += pi[i] * std::log2(pi[i] / r[i]);
  }
  return d;
}

double term_value(const Compiled& c, std::size_t k, const KlProblem& prob, const std::vector<double>& pi) {
  return entropy_of_table(apply_map(c.joint[k], pi)) - entropy_of_table(apply_map(c.given[k], pi)) -
         prob.bracket[k].offset;
}

void normalize(std::vector<double>& v) {
  double s = std::accumulate(v.begin(), v.end(), 0.0);
  if (s > 0.0)
    for (auto& x : v) x /= s;
}

bool project(const KlProblem& prob, const Compiled& c, std::vector<double>& pi, const SolverOptions& opts,
             double* residual, std::size_t* sweeps_out) {
  for (std::size_t i = 0; i < pi.size(); ++i)
    if (!c.support[i]) pi[i] = 0.0;
  normalize(pi);
  double res = 0.0;
  std::size_t sweeps = 0;
  if (!prob.constraints.empty()) {
    for (std::size_t k = 0; k < prob.constraints.size(); ++k) {
      auto m = apply_map(c.cons[k], pi);
      for (std::size_t j = 0; j < m.size(); ++j)
        if (prob.constraints[k].target[j] > 0.0 && m[j] <= 0.0) {
          if (residual) *residual = prob.constraints[k].target[j];
          if (sweeps_out) *sweeps_out = 0;
          return false;
        }
    }
    const bool single = prob.constraints.size() == 1;
    for (sweeps = 1; sweeps <= opts.ipf_max_sweeps; ++sweeps) {
      for (std::size_t k = 0; k < prob.constraints.size(); ++k) {
        const auto& tgt = prob.constraints[k].target;
        auto m = apply_map(c.cons[k], pi);
        for (std::size_t i = 0; i < pi.size(); ++i) {
          if (pi[i] == 0.0) continue;
          double mm = m[c.cons[k].idx[i]];
          pi[i] = mm > 0.0 ? pi[i] * tgt[c.cons[k].idx[i]] / mm : 0.0;
        }
      }
      res = 0.0;
      for (std::size_t k = 0; k < prob.constraints.size(); ++k) {
        auto m = apply_map(c.cons[k], pi);
        for (std::size_t j = 0; j < m.size(); ++j) res = std::max(res, std::abs(m[j] - prob.constraints[k].target[j]));
      }
      if (single || res <= opts.ipf_tolerance) break;
    }
  }
  normalize(pi);
  if (residual) *residual = res;
  if (sweeps_out) *sweeps_out = sweeps;
  return res <= opts.feasibility_tolerance;
}

// Smooth surrogate of [u]^+ with slope sigma(u/tau); tau = 0 gives the exact kink.
double softplus(double u, double tau) {
  if (tau <= 0.0) return std::max(0.0, u);
  double a = u / tau;
  return a > 0.0 ? u + tau * std::log1p(std::exp(-a)) : tau * std::log1p(std::exp(a));
}

double softplus_slope(double u, double tau) {
  if (tau <= 0.0) return u > 0.0 ? 1.0 : 0.0;
  return 1.0 / (1.0 + std::exp(-u / tau));
}

struct SingleRun {
  std::vector<double> best;
  double best_value = kInf;
  std::size_t iterations = 0;
};

// Mirror descent on D + w * softplus(term_k) with continuation in tau.
SingleRun descend(const KlProblem& prob, const Compiled& c, std::size_t k, std::vector<double> pi,
                  const SolverOptions& opts) {
  const double w = prob.bracket_weight;
  const auto& r = prob.reference;
  static constexpr double kTaus[] = {0.05, 1e-2, 2e-3, 4e-4, 1e-4, 0.0};
  const std::size_t per_stage = std::max<std::size_t>(50, opts.max_iterations / std::size(kTaus));

  SingleRun run;
  auto exact = [&](const std::vector<double>& v) {
    return divergence_bits(v, r) + w * std::max(0.0, term_value(c, k, prob, v));
  };
  auto consider = [&](const std::vector<double>& v) {
    double e = exact(v);
    if (e < run.best_value) {
      run.best_value = e;
      run.best = v;
    }
  };
  consider(pi);

  std::vector<double> cand(pi.size());
  for (double tau : kTaus) {
    auto smooth = [&](const std::vector<double>& v, double* u_out) {
      double u = term_value(c, k, prob, v);
      if (u_out) *u_out = u;
      return divergence_bits(v, r) + w * softplus(u, tau);
    };
    double u = 0.0;
    double f = smooth(pi, &u);
    double eta = 0.5;
    std::size_t flat = 0;
    for (std::size_t it = 0; it < per_stage; ++it) {
      ++run.iterations;
      const double s = w * softplus_slope(u, tau);
      auto mj = apply_map(c.joint[k], pi);
      auto mg = apply_map(c.given[k], pi);
      bool accepted = false;
      while (eta > 1e-9) {
        for (std::size_t i = 0; i < pi.size(); ++i) {
          if (!c.support[i] || pi[i] <= 0.0) {
            cand[i] = 0.0;
            continue;
          }
          double lj = mj[c.joint[k].idx[i]], lg = mg[c.given[k].idx[i]];
          double lcond = (lj > 0.0 && lg > 0.0) ? std::log(lj / lg) : 0.0;
          double lv = (1.0 - eta) * std::log(pi[i]) + eta * std::log(r[i]) + eta * s * lcond;
          cand[i] = std::exp(lv);
        }
        normalize(cand);
        for (auto& v : cand)
          if (v > 0.0 && v < 1e-300) v = 1e-300;
        double res = 0.0;
        project(prob, c, cand, opts, &res, nullptr);
        double u2 = 0.0;
        double f2 = smooth(cand, &u2);
        if (f2 < f - 1e-15) {
          double gain = f - f2;
          pi.swap(cand);
          f = f2;
          u = u2;
          eta = std::min(1.0, eta * 2.0);
          accepted = true;
          flat = gain < 1e-13 ? flat + 1 : 0;
          break;
        }
        eta *= 0.5;
      }
      consider(pi);
      if (!accepted || flat >= 5) break;
      if (eta <= 1e-9) break;
    }
  }
  return run;
}

std::vector<double> start_point(const KlProblem& prob, const Compiled& c, std::size_t s, const SolverOptions& opts) {
  const std::size_t n = prob.reference.size();
  std::vector<double> v(n, 0.0);
  std::vector<double> unif(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) unif[i] = c.support[i] ? 1.0 : 0.0;
  normalize(unif);
  if (s == 0) {
    v = prob.reference;
  } else if (s == 1 && !prob.center.empty()) {
    for (std::size_t i = 0; i < n; ++i) v[i] = 0.9 * prob.center[i] + 0.1 * unif[i];
  } else if (s <= 2) {
    v = unif;
  } else {
    Rng rng = Rng::derive(opts.seed, {s});
    for (std::size_t i = 0; i < n; ++i) v[i] = c.support[i] ? -std::log(1.0 - rng.uniform01()) + 1e-3 : 0.0;
  }
  normalize(v);
  return v;
}

}  // namespace

double kl_objective(const KlProblem& prob, const std::vector<double>& pi, double* divergence, double* bracket) {
  Compiled c = compile(prob);
  double d = divergence_bits(pi, prob.reference);
  double b = 0.0;
  if (!prob.bracket.empty()) {
    double m = kInf;
    for (std::size_t k = 0; k < prob.bracket.size(); ++k) m = std::min(m, term_value(c, k, prob, pi));
    b = prob.bracket_weight * std::max(0.0, m);
  }
  if (divergence) *divergence = d;
  if (bracket) *bracket = b;
  return d + b;
}

bool ipf_project(const KlProblem& prob, std::vector<double>& pi, const SolverOptions& opts, double* residual,
                 std::size_t* sweeps) {
  Compiled c = compile(prob);
  return project(prob, c, pi, opts, residual, sweeps);
}

SolveResult solve_i_projection(const KlProblem& prob, const SolverOptions& opts) {
  Compiled c = compile(prob);
  SolveResult out;
  std::vector<double> pi = prob.reference;
  double res = 0.0;
  std::size_t sweeps = 0;
  out.feasible = project(prob, c, pi, opts, &res, &sweeps);
  out.iterations = sweeps;
  out.constraint_residual = res;
  if (!out.feasible) {
    out.diagnostic = "constraint set has no point inside the reference support (residual " +
                     std::to_string(res) + ")";
    return out;
  }
  out.divergence = divergence_bits(pi, prob.reference);
  out.bracket = 0.0;
  out.value = out.divergence;
  out.argmin = std::move(pi);
  return out;
}

SolveResult solve_kl_problem(const KlProblem& prob, const SolverOptions& opts) {
  SolveResult base = solve_i_projection(prob, opts);
  if (prob.bracket.empty() || !base.feasible) return base;
  Compiled c = compile(prob);

  const std::size_t starts = std::max<std::size_t>(1, opts.starts);
  struct StartOut {
    std::vector<double> pi;
    double value = kInf;
    std::size_t iterations = 0;
  };
  std::vector<StartOut> outs(starts);
  parallel_for(starts, opts.workers, [&](std::size_t s) {
    std::vector<double> x0 = start_point(prob, c, s, opts);
    double res = 0.0;
    if (!project(prob, c, x0, opts, &res, nullptr)) x0 = base.argmin;
    StartOut& o = outs[s];
    for (std::size_t k = 0; k < prob.bracket.size(); ++k) {
      SingleRun run = descend(prob, c, k, x0, opts);
      o.iterations += run.iterations;
      double v = kl_objective(prob, run.best);
      if (v < o.value) {
        o.value = v;
        o.pi = std::move(run.best);
      }
    }
  });

  SolveResult out;
  out.feasible = true;
  std::size_t best = 0;
  for (std::size_t s = 0; s < starts; ++s) {
    out.iterations += outs[s].iterations;
    if (outs[s].value < outs[best].value) best = s;
  }
  double runner_up = kInf;
  for (std::size_t s = 0; s < starts; ++s)
    if (s != best) runner_up = std::min(runner_up, outs[s].value);
  out.best_start = best;
  out.argmin = outs[best].pi;
  out.value = kl_objective(prob, out.argmin, &out.divergence, &out.bracket);
  out.gap_estimate = std::isfinite(runner_up) ? runner_up - out.value : 0.0;
  double res = 0.0;
  for (std::size_t k = 0; k < prob.constraints.size(); ++k) {
    auto m = apply_map(c.cons[k], out.argmin);
    for (std::size_t j = 0; j < m.size(); ++j) res = std::max(res, std::abs(m[j] - prob.constraints[k].target[j]));
  }
  out.constraint_residual = res;
  return out;
}

}  // namespace gwht
