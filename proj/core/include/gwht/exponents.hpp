#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gwht/kl_solver.hpp"
#include "gwht/prob.hpp"

namespace gwht {

// Axis label conventions used across the library:
//   source  X, Z1, Z2 (optionally S1, S2)
//   channel X -> Y0, Y1, Y2
namespace labels {
inline const std::string X = "X";
inline const std::string Y[3] = {"Y0", "Y1", "Y2"};
inline const std::string Z[3] = {"", "Z1", "Z2"};
inline const std::string S[3] = {"", "S1", "S2"};
}  // namespace labels

struct HypothesisPair {
  JointPmf p;  // null, over X, Z1, Z2
  JointPmf q;  // alternative, same axes
};

// Throws ArgumentError unless p and q share axes X, Z1, Z2 and p_X = q_X within 1e-9.
void validate_hypotheses(const HypothesisPair& hyp);
// Throws unless chan maps X to Y0, Y1, Y2.
void validate_channel(const JointPmf& source, const CondPmf& chan);

struct RateVector {
  double R[3] = {0.0, 0.0, 0.0};
  double Rt[3] = {0.0, 0.0, 0.0};
};

struct ExponentOptions {
  SolverOptions solver;
  // When set, finite-n corrected variants are returned.
  std::optional<std::size_t> n;
  double eta_n = 0.0;
};

struct ExponentValue {
  double value = kInf;
  double divergence = kInf;  // divergence part
  double extra = 0.0;        // E1 rate surplus or E2 bracket; minus corrections when n is set
  double correction = 0.0;   // amount subtracted for finite n
  bool feasible = false;
  JointPmf argmin;           // over X, Y0, Y1, Y2, Zj
  SolveResult solver;
  std::string diagnostic;
};

struct ExponentReport {
  int j = 1;
  double e0 = kInf, e1 = kInf, e2 = kInf, theta_star = kInf;
  ExponentValue v0, v1, v2;
  int argmin_exponent = 0;
  JointPmf argmin_pi;
  bool binning_ok = true;
  std::optional<std::size_t> n;
};

// Null joint p_{X,Zj} W over (X, Y0, Y1, Y2, Zj) and the reference q_{X,Zj} W.
JointPmf null_joint(const JointPmf& p, const CondPmf& chan, int j);
JointPmf reference_joint(const JointPmf& q, const CondPmf& chan, int j);

ExponentValue exponent_E0(const HypothesisPair& hyp, const CondPmf& chan, int j, const ExponentOptions& opts = {});
ExponentValue exponent_E1(const HypothesisPair& hyp, const CondPmf& chan, const RateVector& rates, int j,
                          const ExponentOptions& opts = {});
ExponentValue exponent_E2(const HypothesisPair& hyp, const CondPmf& chan, const RateVector& rates, int j,
                          const ExponentOptions& opts = {});
ExponentReport theta_star(const HypothesisPair& hyp, const CondPmf& chan, const RateVector& rates, int j,
                          const ExponentOptions& opts = {});

// E1 rate surplus: min over S in {{0},{j},{0,j}} of sum_S (R_i + Rt_i) - H_p(Y_S | Zj, Y_{S^c}).
double rate_surplus(const JointPmf& p, const CondPmf& chan, const RateVector& rates, int j);

// nu_{n,j} = log2(n+1)/n |X||Y0||Y1||Y2||Zj|;  kappa_n = log2(3)/n + nu + eta_n.
double nu_term(std::size_t n, const JointPmf& p, const CondPmf& chan, int j);
double kappa_term(std::size_t n, const JointPmf& p, const CondPmf& chan, int j, double eta_n = 0.0);

struct Inequality {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  // positive when the strict inequality holds
  bool satisfied = false;
  bool interpreted = false;
};

struct RegionReport {
  std::vector<Inequality> lines;
  bool all_satisfied() const;
};

inline constexpr double kMarginTol = 1e-9;

// 11 lines; the R0 max-line is split per i.
RegionReport check_rate_region(const RateVector& rates, const JointPmf& p, const CondPmf& chan);
// sum_{i in S} Rt_i < H(Y_S | X), 7 lines.
RegionReport check_tilde_region(const RateVector& rates, const JointPmf& p, const CondPmf& chan);
// 3 lines per detector j.
RegionReport check_binning_conditions(const RateVector& rates, const JointPmf& p, const CondPmf& chan, int j);

// H(S_i | Z_i, Y0, Y_i) under source * chan.
double privacy_bound(const JointPmf& source, const CondPmf& chan, int i);

}  // namespace gwht
