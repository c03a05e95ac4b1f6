#pragma once

// Shared fixtures for unit and acceptance tests.

#include <cmath>

#include "grid_oracle.hpp"
#include "gwht/exponents.hpp"
#include "gwht/random.hpp"

namespace testsupport {

struct LibInstance {
  gwht::HypothesisPair hyp;
  gwht::CondPmf chan;
  gwht::RateVector rates;
};

// Random all-binary instance: X, Z1, Y0 binary; Z2, Y1, Y2 single-symbol.
inline oracle::BinaryInstance random_binary(gwht::Rng& rng) {
  oracle::BinaryInstance in;
  double px = 0.2 + 0.6 * rng.uniform01();
  for (int x = 0; x < 2; ++x) {
    double a = 0.05 + 0.9 * rng.uniform01(), b = 0.05 + 0.9 * rng.uniform01();
    double xm = x ? 1 - px : px;
    in.p_xz[x] = {xm * a, xm * (1 - a)};
    in.q_xz[x] = {xm * b, xm * (1 - b)};
    double e = 0.05 + 0.4 * rng.uniform01();
    in.w[x] = {x ? e : 1 - e, x ? 1 - e : e};
  }
  for (int i = 0; i < 3; ++i) {
    in.R[i] = 0.6 * rng.uniform01();
    in.Rt[i] = 0.6 * rng.uniform01();
  }
  return in;
}

inline LibInstance to_lib(const oracle::BinaryInstance& in) {
  using gwht::JointPmf;
  std::vector<gwht::Alphabet> axes{{"X", 2}, {"Z1", 2}, {"Z2", 1}};
  LibInstance out{
      {JointPmf(axes, {in.p_xz[0][0], in.p_xz[0][1], in.p_xz[1][0], in.p_xz[1][1]}),
       JointPmf(axes, {in.q_xz[0][0], in.q_xz[0][1], in.q_xz[1][0], in.q_xz[1][1]})},
      gwht::CondPmf({{"X", 2}}, {{"Y0", 2}, {"Y1", 1}, {"Y2", 1}}, {in.w[0][0], in.w[0][1], in.w[1][0], in.w[1][1]}),
      {}};
  for (int i = 0; i < 3; ++i) {
    out.rates.R[i] = in.R[i];
    out.rates.Rt[i] = in.Rt[i];
  }
  return out;
}

inline std::vector<double> random_simplex(gwht::Rng& rng, std::size_t k) {
  std::vector<double> w(k);
  double s = 0.0;
  for (auto& v : w) s += (v = -std::log(1.0 - rng.uniform01()));
  for (auto& v : w) v /= s;
  return w;
}

// Random instance with every alphabet binary (Y1, Y2 included), product channel.
inline LibInstance random_full_binary(gwht::Rng& rng) {
  using gwht::JointPmf;
  std::vector<gwht::Alphabet> axes{{"X", 2}, {"Z1", 2}, {"Z2", 2}};
  auto p = random_simplex(rng, 8);
  std::vector<double> q(8);
  // q keeps p_X and redraws Z given X.
  for (int x = 0; x < 2; ++x) {
    double mass = p[4 * x] + p[4 * x + 1] + p[4 * x + 2] + p[4 * x + 3];
    auto c = random_simplex(rng, 4);
    for (int k = 0; k < 4; ++k) q[4 * x + k] = mass * c[k];
  }
  std::vector<double> rows;
  double e[3];
  for (double& v : e) v = 0.05 + 0.4 * rng.uniform01();
  for (int x = 0; x < 2; ++x)
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int c = 0; c < 2; ++c) {
          double pr = 1.0;
          int ys[3] = {a, b, c};
          for (int i = 0; i < 3; ++i) pr *= ys[i] == x ? 1 - e[i] : e[i];
          rows.push_back(pr);
        }
  LibInstance out{{JointPmf(axes, p), JointPmf(axes, q)},
                  gwht::CondPmf({{"X", 2}}, {{"Y0", 2}, {"Y1", 2}, {"Y2", 2}}, rows),
                  {}};
  for (int i = 0; i < 3; ++i) {
    out.rates.R[i] = 0.8 * rng.uniform01();
    out.rates.Rt[i] = 0.8 * rng.uniform01();
  }
  return out;
}

}  // namespace testsupport
