#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gwht/prob.hpp"

namespace gwht {

struct MarginalConstraint {
  AxisSet axes;                 // positions in the problem's axis list
  std::vector<double> target;   // row-major over `axes` in that order
};

// One candidate inside the bracket: H_pi(vars | given) - offset.
struct BracketTerm {
  AxisSet vars;
  AxisSet given;
  double offset = 0.0;
};

// minimize D(pi || reference) + weight * [ min_k term_k(pi) ]^+
// over pi in the simplex satisfying every marginal constraint.
struct KlProblem {
  std::vector<std::size_t> sizes;
  std::vector<double> reference;
  std::vector<MarginalConstraint> constraints;
  std::vector<BracketTerm> bracket;
  double bracket_weight = 0.5;
  // Optional extra start (e.g. the null joint); empty means none.
  std::vector<double> center;
};

struct SolverOptions {
  std::size_t starts = 16;
  std::size_t max_iterations = 4000;
  std::size_t ipf_max_sweeps = 20000;
  double ipf_tolerance = 1e-12;
  double feasibility_tolerance = 1e-6;
  std::uint64_t seed = 0x5eed;
  std::size_t workers = 1;
};

struct SolveResult {
  double value = kInf;
  double divergence = kInf;
  double bracket = 0.0;          // weight * [min]^+ at the argmin
  std::vector<double> argmin;
  bool feasible = false;
  std::size_t iterations = 0;
  std::size_t best_start = 0;
  double gap_estimate = 0.0;     // spread between best and runner-up start
  double constraint_residual = 0.0;
  std::string diagnostic;
};

// Exact evaluation of the objective at pi.
double kl_objective(const KlProblem& prob, const std::vector<double>& pi, double* divergence = nullptr,
                    double* bracket = nullptr);

// Projects `start` (KL-Bregman) onto the constraint set by iterative
// proportional fitting. Returns false if the residual stays above
// feasibility_tolerance.
bool ipf_project(const KlProblem& prob, std::vector<double>& pi, const SolverOptions& opts, double* residual,
                 std::size_t* sweeps = nullptr);

// Pure divergence minimum (the I-projection of the reference); bracket ignored.
SolveResult solve_i_projection(const KlProblem& prob, const SolverOptions& opts = {});

// Full objective, multi-start; reduces to solve_i_projection when bracket is empty.
SolveResult solve_kl_problem(const KlProblem& prob, const SolverOptions& opts = {});

}  // namespace gwht
