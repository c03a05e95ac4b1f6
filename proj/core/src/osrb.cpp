#include "gwht/osrb.hpp"

#include <cmath>
#include <cstdlib>
#include <numeric>

#include "gwht/errors.hpp"
#include "gwht/parallel.hpp"

namespace gwht {

namespace {

constexpr double kMaxTensorCells = 2e7;

std::size_t ipow(std::size_t base, std::size_t e) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < e; ++i) r *= base;
  return r;
}

double dpow(double base, std::size_t e) { return std::pow(base, static_cast<double>(e)); }

void check_source(const BinningSpec& spec, const OsrbSource& src) {
  if (spec.t() == 0) throw ArgumentError("binning spec needs at least one source");
  if (spec.n == 0) throw ArgumentError("blocklength must be >= 1");
  if (src.chan.to_axes().size() != spec.t())
    throw ArgumentError("channel has " + std::to_string(src.chan.to_axes().size()) + " outputs, spec has " +
                        std::to_string(spec.t()) + " rates");
  if (src.chan.from_size() != src.p_x.size()) throw ArgumentError("channel input size differs from |X|");
}

}  // namespace

std::uint64_t bin_count(double rate, std::size_t n) {
  if (!(rate >= 0.0) || !std::isfinite(rate)) throw ArgumentError("bin rate must be a finite non-negative number");
  double v = std::exp2(static_cast<double>(n) * rate);
  if (v > 9.0e15) throw ResourceError("bin count 2^{nR}", v, 9.0e15);
  double r = std::round(v);
  if (std::abs(v - r) <= 1e-9 * std::max(1.0, v)) return static_cast<std::uint64_t>(std::max(1.0, r));
  return static_cast<std::uint64_t>(std::ceil(v));
}

std::vector<std::uint64_t> BinningSpec::bin_counts() const {
  std::vector<std::uint64_t> m;
  for (double r : rates) m.push_back(bin_count(r, n));
  return m;
}

CorrectionTerms correction_terms(std::size_t x_size, const std::vector<std::size_t>& y_sizes, std::size_t n) {
  if (n == 0) throw ArgumentError("blocklength must be >= 1");
  if (y_sizes.empty() || y_sizes.size() > 16) throw ArgumentError("need between 1 and 16 binned sources");
  const double lg = std::log2(static_cast<double>(n) + 1.0) / static_cast<double>(n);
  const double T = static_cast<double>(y_sizes.size());
  CorrectionTerms c;
  double all = 1.0;
  for (auto s : y_sizes) all *= static_cast<double>(s);
  c.eps_n = static_cast<double>(x_size) * all * lg;
  const unsigned full = (1u << y_sizes.size());
  for (unsigned mask = 1; mask < full; ++mask) {
    double ys = 1.0;
    for (std::size_t i = 0; i < y_sizes.size(); ++i)
      if (mask & (1u << i)) ys *= static_cast<double>(y_sizes[i]);
    c.delta_n[mask] = static_cast<double>(x_size) * ys * lg + T / static_cast<double>(n);
  }
  return c;
}

OsrbExponent zeta_exponent(const BinningSpec& spec, const Pmf& p_x, const CondPmf& chan, const SolverOptions& opts) {
  if (p_x.rank() != 1) throw ArgumentError("zeta_exponent expects a single-axis p_X");
  NType z{Alphabet{"Z", 1}, {static_cast<std::uint32_t>(spec.n)}, static_cast<std::uint32_t>(spec.n)};
  CondPmf x_given_z({{"Z", 1}}, p_x.axes(), p_x.weights());
  return aleph_exponent(spec, z, x_given_z, chan, opts);
}

OsrbExponent aleph_exponent(const BinningSpec& spec, const NType& z_type, const CondPmf& p_x_given_z,
                            const CondPmf& chan, const SolverOptions& opts) {
  if (spec.n == 0) throw ArgumentError("blocklength must be >= 1");
  if (z_type.n != spec.n) throw ArgumentError("z_type must be an n-type matching the binning blocklength");
  if (p_x_given_z.from_axes().size() != 1 || p_x_given_z.to_axes().size() != 1)
    throw ArgumentError("p_X|Z must map one Z axis to one X axis");
  if (p_x_given_z.from_size() != z_type.alphabet.size) throw ArgumentError("|Z| differs between z_type and p_X|Z");
  const std::size_t nx = p_x_given_z.to_size();
  if (chan.from_size() != nx) throw ArgumentError("channel input size differs from |X|");
  const std::size_t T = spec.t();
  if (T == 0 || chan.to_axes().size() != T) throw ArgumentError("channel outputs must match the number of rates");

  const std::size_t nz = z_type.alphabet.size;
  const std::size_t ny = chan.to_size();
  KlProblem prob;
  prob.sizes = {nz, nx};
  std::vector<std::size_t> ysz;
  for (const auto& a : chan.to_axes()) {
    prob.sizes.push_back(a.size);
    ysz.push_back(a.size);
  }
  prob.reference.assign(nz * nx * ny, 0.0);
  std::vector<double> zbar(nz);
  for (std::size_t z = 0; z < nz; ++z) zbar[z] = z_type.freq(z);
  for (std::size_t z = 0; z < nz; ++z)
    for (std::size_t x = 0; x < nx; ++x)
      for (std::size_t y = 0; y < ny; ++y)
        prob.reference[(z * nx + x) * ny + y] = zbar[z] * p_x_given_z(z, x) * chan(x, y);
  prob.constraints.push_back(MarginalConstraint{{0}, zbar});

  CorrectionTerms corr = correction_terms(nx, ysz, spec.n);
  const unsigned full = 1u << T;
  for (unsigned mask = 1; mask < full; ++mask) {
    BracketTerm t;
    t.given = {1};
    for (std::size_t i = 0; i < T; ++i)
      if (mask & (1u << i)) {
        t.vars.push_back(2 + i);
        t.offset += spec.rates[i];
      }
    t.offset += corr.delta_n.at(mask);
    prob.bracket.push_back(t);
  }

  OsrbExponent out;
  out.solver = solve_kl_problem(prob, opts);
  out.eps_n = corr.eps_n;
  if (!out.solver.feasible) return out;
  out.divergence = out.solver.divergence;
  out.bracket = out.solver.bracket;
  out.value = out.solver.value - corr.eps_n;
  out.negative = out.value < 0.0;
  std::vector<Alphabet> axes{z_type.alphabet, p_x_given_z.to_axes()[0]};
  for (const auto& a : chan.to_axes()) axes.push_back(a);
  out.argmin = JointPmf::normalized(std::move(axes), out.solver.argmin);
  return out;
}

OsrbSource OsrbSource::from_joint(const JointPmf& joint) {
  if (joint.rank() < 2) throw ArgumentError("OSRB source needs Y axes followed by an X axis");
  const std::size_t x = joint.rank() - 1;
  AxisSet ys(x);
  std::iota(ys.begin(), ys.end(), 0);
  return OsrbSource{marginalize(joint, AxisSet{x}), conditional(joint, {x}, ys)};
}

double osrb_budget() {
  if (const char* env = std::getenv("GWHT_OSRB_BUDGET")) {
    char* end = nullptr;
    double v = std::strtod(env, &end);
    if (end != env && v > 0.0) return v;
  }
  return 1e6;
}

OsrbBinning sample_osrb_binning(const BinningSpec& spec, const OsrbSource& src, Rng& rng) {
  check_source(spec, src);
  auto m = spec.bin_counts();
  OsrbBinning b;
  for (std::size_t i = 0; i < spec.t(); ++i) {
    std::size_t count = ipow(src.chan.to_axes()[i].size, spec.n);
    std::vector<std::uint32_t> v(count);
    for (auto& e : v) e = static_cast<std::uint32_t>(rng.below(m[i]));
    b.bins.push_back(std::move(v));
  }
  return b;
}

double osrb_tv_for_binning(const BinningSpec& spec, const OsrbSource& src, const OsrbBinning& binning) {
  check_source(spec, src);
  const std::size_t n = spec.n, T = spec.t();
  const auto m = spec.bin_counts();
  std::vector<std::size_t> ks;
  for (const auto& a : src.chan.to_axes()) ks.push_back(a.size);
  const std::size_t K = src.chan.to_size(), X = src.p_x.size();

  double nb = 1.0;
  for (auto v : m) nb *= static_cast<double>(v);
  const double ky = dpow(static_cast<double>(K), n);
  if (ky > osrb_budget()) throw ResourceError("OSRB enumeration of prod |Y_i|^n", ky, osrb_budget());
  const double cells = nb * dpow(static_cast<double>(std::max(K, X)), n);
  if (cells > kMaxTensorCells) throw ResourceError("OSRB bin-by-sequence tensor", cells, kMaxTensorCells);
  const std::size_t B = static_cast<std::size_t>(nb);
  const std::size_t KN = static_cast<std::size_t>(ky);

  std::vector<std::size_t> bstride(T, 1);
  for (std::size_t i = T; i-- > 1;) bstride[i - 1] = bstride[i] * m[i];
  std::vector<std::size_t> kstride(T, 1);
  for (std::size_t i = T; i-- > 1;) kstride[i - 1] = kstride[i] * ks[i];

  std::vector<std::uint32_t> joint_bin(KN);
  std::vector<std::size_t> seq(T);
  for (std::size_t yi = 0; yi < KN; ++yi) {
    std::fill(seq.begin(), seq.end(), 0);
    std::size_t rem = yi, place = KN;
    for (std::size_t t = 0; t < n; ++t) {
      place /= K;
      std::size_t s = rem / place;
      rem %= place;
      for (std::size_t i = 0; i < T; ++i) seq[i] = seq[i] * ks[i] + (s / kstride[i]) % ks[i];
    }
    std::size_t b = 0;
    for (std::size_t i = 0; i < T; ++i) b += binning.bins[i][seq[i]] * bstride[i];
    joint_bin[yi] = static_cast<std::uint32_t>(b);
  }
  auto a = bin_given_sequence(n, src.chan.rows(), X, K, joint_bin, B);

  const std::size_t XN = ipow(X, n);
  std::vector<double> px(XN, 1.0);
  for (std::size_t xi = 0; xi < XN; ++xi) {
    std::size_t rem = xi;
    double p = 1.0;
    for (std::size_t t = 0; t < n; ++t) {
      p *= src.p_x[rem % X];
      rem /= X;
    }
    px[xi] = p;
  }
  const double mean_mass = 1.0 / nb;
  double tv = 0.0;
  for (std::size_t b = 0; b < B; ++b)
    for (std::size_t xi = 0; xi < XN; ++xi) tv += px[xi] * std::abs(a[b * XN + xi] - mean_mass);
  return 0.5 * tv;
}

std::vector<double> bin_given_sequence(std::size_t n, const std::vector<double>& w, std::size_t x_size,
                                       std::size_t k_size, const std::vector<std::uint32_t>& bin_of_seq,
                                       std::size_t nbins) {
  const std::size_t X = x_size, K = k_size;
  if (w.size() != X * K) throw ArgumentError("bin_given_sequence: channel shape mismatch");
  const double cells = static_cast<double>(nbins) * dpow(static_cast<double>(std::max(K, X)), n);
  if (cells > kMaxTensorCells) throw ResourceError("bin-by-sequence tensor", cells, kMaxTensorCells);
  const std::size_t KN = ipow(K, n);
  if (bin_of_seq.size() != KN) throw ArgumentError("bin_given_sequence: one bin per sequence required");
  std::vector<double> a(nbins * KN, 0.0);
  for (std::size_t yi = 0; yi < KN; ++yi) {
    if (bin_of_seq[yi] >= nbins) throw ArgumentError("bin index out of range");
    a[bin_of_seq[yi] * KN + yi] = 1.0;
  }
  // Replace each position's K-axis by an X-axis, positions most significant first.
  std::vector<std::size_t> dims(n, K);
  for (std::size_t t = 0; t < n; ++t) {
    std::size_t outer = nbins, inner = 1;
    for (std::size_t s = 0; s < t; ++s) outer *= dims[s];
    for (std::size_t s = t + 1; s < n; ++s) inner *= dims[s];
    std::vector<double> next(outer * X * inner, 0.0);
    for (std::size_t o = 0; o < outer; ++o)
      for (std::size_t y = 0; y < K; ++y) {
        const double* src_row = &a[(o * K + y) * inner];
        for (std::size_t x = 0; x < X; ++x) {
          double wv = w[x * K + y];
          if (wv == 0.0) continue;
          double* dst = &next[(o * X + x) * inner];
          for (std::size_t k = 0; k < inner; ++k) dst[k] += wv * src_row[k];
        }
      }
    a.swap(next);
    dims[t] = X;
  }
  return a;
}

OsrbTvResult empirical_osrb_tv(const BinningSpec& spec, const OsrbSource& src, std::size_t trials, std::uint64_t seed,
                               std::size_t workers) {
  check_source(spec, src);
  if (trials == 0) throw ArgumentError("need at least one trial");
  std::vector<double> tv(trials);
  parallel_for(trials, workers, [&](std::size_t k) {
    Rng rng = Rng::derive(seed, {0x05b3u, k});
    tv[k] = osrb_tv_for_binning(spec, src, sample_osrb_binning(spec, src, rng));
  });
  OsrbTvResult r;
  r.trials = trials;
  double s = 0.0;
  for (double v : tv) s += v;
  r.mean_tv = s / static_cast<double>(trials);
  if (trials > 1) {
    double ss = 0.0;
    for (double v : tv) ss += (v - r.mean_tv) * (v - r.mean_tv);
    r.stderr_tv = std::sqrt(ss / static_cast<double>(trials - 1) / static_cast<double>(trials));
  }
  return r;
}

OsrbTvResult empirical_osrb_tv(const BinningSpec& spec, const JointPmf& p_source, std::size_t trials,
                               std::uint64_t seed, std::size_t workers) {
  return empirical_osrb_tv(spec, OsrbSource::from_joint(p_source), trials, seed, workers);
}

double exhaustive_osrb_tv(const BinningSpec& spec, const OsrbSource& src, double max_binnings) {
  check_source(spec, src);
  auto m = spec.bin_counts();
  std::vector<std::size_t> counts;
  double total = 1.0;
  for (std::size_t i = 0; i < spec.t(); ++i) {
    counts.push_back(ipow(src.chan.to_axes()[i].size, spec.n));
    total *= dpow(static_cast<double>(m[i]), counts.back());
  }
  if (total > max_binnings) throw ResourceError("exhaustive binning enumeration", total, max_binnings);
  OsrbBinning b;
  for (auto c : counts) b.bins.emplace_back(c, 0);
  double sum = 0.0;
  std::size_t visited = 0;
  for (;;) {
    sum += osrb_tv_for_binning(spec, src, b);
    ++visited;
    // Odometer over every (source, sequence) slot.
    std::size_t i = 0, s = 0;
    for (;;) {
      if (i == b.bins.size()) return sum / static_cast<double>(visited);
      if (++b.bins[i][s] < m[i]) break;
      b.bins[i][s] = 0;
      if (++s == b.bins[i].size()) {
        s = 0;
        ++i;
      }
    }
  }
}

}  // namespace gwht
