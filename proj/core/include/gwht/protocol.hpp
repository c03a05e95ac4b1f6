#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "gwht/exponents.hpp"
#include "gwht/prob.hpp"
#include "gwht/random.hpp"
#include "gwht/types.hpp"

namespace gwht {

enum class ProtocolMode { A, B };

struct ProtocolConfig {
  JointPmf source;  // X, Z1, Z2, S1, S2
  JointPmf alt;     // X, Z1, Z2
  CondPmf chan;     // X -> Y0, Y1, Y2
  RateVector rates;
  std::size_t n = 1;
  double delta_c = 1.0;
  std::optional<double> delta_prime_override;
  std::uint64_t seed = 0;
  double budget = 0.0;  // 0 means enumeration_budget()

  double delta_prime() const;
  double enum_budget() const;
  // Throws ArgumentError on inconsistent axes or marginals.
  void validate() const;
};

// Precomputed tables shared read-only by all trials.
class ProtocolModel {
 public:
  explicit ProtocolModel(ProtocolConfig cfg);

  const ProtocolConfig& config() const { return cfg_; }
  std::size_t n() const { return cfg_.n; }
  double delta() const { return delta_; }
  std::size_t x_size() const { return nx_; }
  std::size_t y_size(int i) const { return ny_[i]; }
  std::size_t z_size(int j) const { return nz_[j]; }
  std::size_t s_size(int j) const { return ns_[j]; }
  bool factorizes() const { return factorizes_; }
  // Per-component channel W_i(y|x), row-major |X| x |Y_i| (valid when factorizes()).
  const std::vector<double>& component(int i) const { return comp_[i]; }

  // p_{X,Y0,Y1,Y2} and p_{Y0,Yj,Zj} targets for the detectors.
  const JointPmf& target_xy() const { return target_xy_; }
  const JointPmf& target_yz(int j) const { return target_yz_[j]; }

  // Per-letter tables: X,Z1,Z2 under null/alt and X,Z1,Z2,S1,S2 under null.
  const std::vector<double>& xz_table(int hypothesis) const { return hypothesis == 0 ? p_xz_ : q_xz_; }
  const std::vector<double>& xzs_table() const { return p_xzs_; }

 private:
  ProtocolConfig cfg_;
  double delta_ = 0.0;
  std::size_t nx_ = 0;
  std::array<std::size_t, 3> ny_{}, nz_{}, ns_{};
  bool factorizes_ = false;
  std::array<std::vector<double>, 3> comp_;
  JointPmf target_xy_;
  std::array<JointPmf, 3> target_yz_;
  std::vector<double> p_xz_, q_xz_, p_xzs_;
};

// Message bins B_M,i and shared-randomness bins B_F,i for one source.
struct SourceBins {
  std::size_t alphabet = 2;
  std::size_t sequences = 1;
  std::uint64_t m_bins = 1;
  std::uint64_t f_bins = 1;
  std::vector<std::uint32_t> m, f;
  // Sequences sorted by (m, f) and by f alone.
  std::vector<std::uint64_t> mf_keys;
  std::vector<std::uint32_t> mf_seqs;
  std::vector<std::uint32_t> f_keys;
  std::vector<std::uint32_t> f_seqs;

  std::span<const std::uint32_t> bucket(std::uint64_t mi, std::uint64_t fi) const;
  std::span<const std::uint32_t> f_bucket(std::uint64_t fi) const;
  void index();
};

struct BinningRealization {
  std::size_t n = 1;
  std::array<SourceBins, 3> src;

  // Builds the inverse indices; m/f maps given explicitly (tests, fixtures).
  static BinningRealization from_maps(std::size_t n, const std::array<std::size_t, 3>& alphabets,
                                      const std::array<std::uint64_t, 3>& m_bins,
                                      const std::array<std::uint64_t, 3>& f_bins,
                                      std::array<std::vector<std::uint32_t>, 3> m,
                                      std::array<std::vector<std::uint32_t>, 3> f);
};

BinningRealization sample_binning(const ProtocolModel& model, Rng& rng);

// Sequence index <-> symbols, position 0 most significant.
std::size_t sequence_index(const std::vector<std::uint32_t>& symbols, std::size_t alphabet);
std::vector<std::uint32_t> sequence_symbols(std::size_t index, std::size_t alphabet, std::size_t n);

struct Transcript {
  Sequence x, z1, z2, s1, s2, y0, y1, y2;
  std::array<std::uint64_t, 3> m{};
  std::array<std::uint64_t, 3> f{};
  std::array<std::uint32_t, 3> y_index{};
  JointNType type_index;
  const Sequence& y(int i) const { return i == 0 ? y0 : (i == 1 ? y1 : y2); }
  const Sequence& z(int j) const { return j == 1 ? z1 : z2; }
};

// Protocol B step 1: y ~ P(y | x, f). Throws EncoderAbort on empty support.
Transcript encode_protocol_b(const ProtocolModel& model, const BinningRealization& bins, const Sequence& x,
                             const std::array<std::uint64_t, 3>& f, Rng& rng);
// Protocol A: y ~ W^n(.|x), f read off B_F.
Transcript encode_protocol_a(const ProtocolModel& model, const BinningRealization& bins, const Sequence& x, Rng& rng);

// P(y | x, f) for every y-tuple in the F-buckets (exact; for tests and small n).
// Entries are (y0 index, y1 index, y2 index, probability).
struct RestrictedLawEntry {
  std::array<std::uint32_t, 3> y;
  double prob;
};
std::vector<RestrictedLawEntry> restricted_law(const ProtocolModel& model, const BinningRealization& bins,
                                               const Sequence& x, const std::array<std::uint64_t, 3>& f);

struct DetectionEvents {
  bool e0 = false;
  bool ej = false;
  bool ej_sender = false;      // the true pair is jointly typical with z
  bool ej_non_sender = false;  // some other pair in the buckets is
  int decision = 1;            // 0 iff e0 and ej
};

DetectionEvents detect_events(const ProtocolModel& model, const BinningRealization& bins, int j, const Sequence& z,
                              std::uint64_t m0, std::uint64_t mj, std::uint64_t f0, std::uint64_t fj,
                              const JointNType& type_index,
                              std::optional<std::array<std::uint32_t, 2>> true_pair = std::nullopt);
int detect(const ProtocolModel& model, const BinningRealization& bins, int j, const Sequence& z, std::uint64_t m0,
           std::uint64_t mj, std::uint64_t f0, std::uint64_t fj, const JointNType& type_index);

struct ErrorReport {
  std::size_t n = 0;
  std::size_t trials = 0;
  std::array<double, 3> alpha{}, beta{};          // index by detector j (1, 2)
  std::array<double, 3> alpha_se{}, beta_se{};
  std::array<std::uint64_t, 2> aborts{};           // per hypothesis
  std::array<std::uint64_t, 3> witness_violations{};
};

struct SimulationOptions {
  ProtocolMode mode = ProtocolMode::B;
  std::size_t workers = 1;
  // Checks the event decomposition on every trial and counts violations.
  bool check_witness = true;
  std::uint64_t max_resamples = 1000000;
};

ErrorReport estimate_errors(const ProtocolModel& model, std::size_t trials, std::uint64_t seed,
                            const SimulationOptions& opts = {});

enum class EquivocationMode { Exact, Plugin };

// H(S_i^n | Z_i^n, M0, Mi) / n under the given binning.
double estimate_equivocation(const ProtocolModel& model, const BinningRealization& bins, int i,
                             EquivocationMode mode, std::size_t trials, std::uint64_t seed,
                             ProtocolMode protocol = ProtocolMode::B);

// Exact || P_A(x^n, f) - p(x^n) / prod F_i ||_TV for one realization.
double duality_tv(const ProtocolModel& model, const BinningRealization& bins);

}  // namespace gwht
