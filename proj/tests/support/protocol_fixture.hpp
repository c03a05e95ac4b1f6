#pragma once

// Binary protocol configurations built in code: X uniform, Z_j and S_j
// independent BSCs of X, and a product BSC channel to Y0, Y1, Y2.

#include <array>
#include <vector>

#include "gwht/protocol.hpp"

namespace testsupport {

struct BinarySetup {
  double pz = 0.1;   // Z_j = X xor Bern(pz) under the null
  double qz = 0.19;  // same under the alternative
  double ps = 0.25;  // S_j = X xor Bern(ps)
  std::array<double, 3> eps{0.1, 0.1, 0.1};
  gwht::RateVector rates{{0.5, 0.5, 0.5}, {0.3, 0.3, 0.3}};
  std::size_t n = 4;
  double delta_c = 0.7;
  std::uint64_t seed = 1;
};

inline double flip(int a, int b, double e) { return a == b ? 1 - e : e; }

inline gwht::CondPmf product_bsc(const std::array<double, 3>& eps) {
  std::vector<double> rows;
  for (int x = 0; x < 2; ++x)
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int c = 0; c < 2; ++c) rows.push_back(flip(x, a, eps[0]) * flip(x, b, eps[1]) * flip(x, c, eps[2]));
  return gwht::CondPmf({{"X", 2}}, {{"Y0", 2}, {"Y1", 2}, {"Y2", 2}}, rows);
}

inline gwht::ProtocolConfig binary_config(const BinarySetup& s) {
  std::vector<double> src, alt;
  for (int x = 0; x < 2; ++x)
    for (int z1 = 0; z1 < 2; ++z1)
      for (int z2 = 0; z2 < 2; ++z2) {
        alt.push_back(0.5 * flip(x, z1, s.qz) * flip(x, z2, s.qz));
        for (int s1 = 0; s1 < 2; ++s1)
          for (int s2 = 0; s2 < 2; ++s2)
            src.push_back(0.5 * flip(x, z1, s.pz) * flip(x, z2, s.pz) * flip(x, s1, s.ps) * flip(x, s2, s.ps));
      }
  gwht::ProtocolConfig c;
  c.source = gwht::JointPmf({{"X", 2}, {"Z1", 2}, {"Z2", 2}, {"S1", 2}, {"S2", 2}}, src);
  c.alt = gwht::JointPmf({{"X", 2}, {"Z1", 2}, {"Z2", 2}}, alt);
  c.chan = product_bsc(s.eps);
  c.rates = s.rates;
  c.n = s.n;
  c.delta_c = s.delta_c;
  c.seed = s.seed;
  return c;
}

}  // namespace testsupport
