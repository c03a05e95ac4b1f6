#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace gwht {

std::uint64_t splitmix64(std::uint64_t& state);

// mt19937_64 with library-independent draws so streams are reproducible
// across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0);
  // Independent stream for (seed, tag...) e.g. (seed, hypothesis, trial).
  static Rng derive(std::uint64_t seed, std::initializer_list<std::uint64_t> tags);

  std::uint64_t next() { return eng_(); }
  // Unbiased integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  // Uniform in [0, 1) with 53 random bits.
  double uniform01();
  // Index drawn with probability proportional to w (sum must be positive).
  std::size_t categorical(const std::vector<double>& w);

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace gwht
