#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "gwht/kl_solver.hpp"
#include "gwht/prob.hpp"
#include "gwht/types.hpp"

namespace gwht {

// ceil(2^{nR}), guarded so that exact powers of two do not round up.
std::uint64_t bin_count(double rate, std::size_t n);

struct BinningSpec {
  std::vector<double> rates;  // one per binned source
  std::size_t n = 1;

  std::size_t t() const { return rates.size(); }
  std::vector<std::uint64_t> bin_counts() const;
};

struct CorrectionTerms {
  double eps_n = 0.0;
  // Keyed by the bitmask of S over the T sources (bit i <-> source i).
  std::map<unsigned, double> delta_n;
};

// eps_n = |X| |Y_1..Y_T| log2(n+1)/n;  delta_n^S = |X| |Y_S| log2(n+1)/n + T/n.
CorrectionTerms correction_terms(std::size_t x_size, const std::vector<std::size_t>& y_sizes, std::size_t n);

struct OsrbExponent {
  double value = kInf;  // raw, may be negative
  double divergence = kInf;
  double bracket = 0.0;
  double eps_n = 0.0;
  bool negative = false;
  JointPmf argmin;  // over Z, X, Y_1..Y_T
  SolveResult solver;
};

// chan maps p_X's axis to the T binned sources.
OsrbExponent zeta_exponent(const BinningSpec& spec, const Pmf& p_x, const CondPmf& chan,
                           const SolverOptions& opts = {});
// z_type is the constant composition of Z^n; p_x_given_z maps Z to X.
OsrbExponent aleph_exponent(const BinningSpec& spec, const NType& z_type, const CondPmf& p_x_given_z,
                            const CondPmf& chan, const SolverOptions& opts = {});

// Source for the empirical verifier: p_X and a channel X -> Y_1..Y_T.
struct OsrbSource {
  Pmf p_x;
  CondPmf chan;

  // Splits a joint whose last axis is X and other axes are Y_1..Y_T.
  static OsrbSource from_joint(const JointPmf& joint);
};

// table[b * |X|^n + x^n] = P(bin(Y^n) = b | x^n) for Y^n ~ prod_t w(.|x_t).
// w is row-major |X| x K; bin_of_seq gives each of the K^n sequences a bin in [0, nbins).
std::vector<double> bin_given_sequence(std::size_t n, const std::vector<double>& w, std::size_t x_size,
                                       std::size_t k_size, const std::vector<std::uint32_t>& bin_of_seq,
                                       std::size_t nbins);

// One binning realization: bins[i][seq] for every y_i^n (row-major sequence index).
struct OsrbBinning {
  std::vector<std::vector<std::uint32_t>> bins;
};

OsrbBinning sample_osrb_binning(const BinningSpec& spec, const OsrbSource& src, Rng& rng);

// || P(x^n, b) - p(x^n) / prod M_i ||_TV for one realization, computed exactly.
double osrb_tv_for_binning(const BinningSpec& spec, const OsrbSource& src, const OsrbBinning& binning);

struct OsrbTvResult {
  double mean_tv = 0.0;
  double stderr_tv = 0.0;
  std::size_t trials = 0;
};

// Default budget 1e6 on prod |Y_i|^n; GWHT_OSRB_BUDGET overrides.
double osrb_budget();

OsrbTvResult empirical_osrb_tv(const BinningSpec& spec, const OsrbSource& src, std::size_t trials,
                               std::uint64_t seed, std::size_t workers = 1);
OsrbTvResult empirical_osrb_tv(const BinningSpec& spec, const JointPmf& p_source, std::size_t trials,
                               std::uint64_t seed, std::size_t workers = 1);

// Mean over every binning function (tiny instances only).
double exhaustive_osrb_tv(const BinningSpec& spec, const OsrbSource& src, double max_binnings = 1e6);

}  // namespace gwht
