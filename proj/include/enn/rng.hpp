#pragma once

#include <cstdint>
#include <vector>

namespace enn {

// xorshift64* generator. The stream is part of the artifact contract so a
// port in any language can reproduce datasets and initializations:
//
//   state ^= state >> 12
//   state ^= state << 25
//   state ^= state >> 27
//   output = state * 0x2545F4914F6CDD1D        (64-bit wrapping multiply)
//
// A zero seed is replaced by 0x9E3779B97F4A7C15. uniform01() takes the top
// 53 bits of the output: (output >> 11) * 2^-53, giving a double in [0,1).
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 1)
      : state_(seed != 0 ? seed : 0x9E3779B97F4A7C15ull) {}

  std::uint64_t next() {
    state_ ^= state_ >> 12;
    state_ ^= state_ << 25;
    state_ ^= state_ >> 27;
    return state_ * 0x2545F4914F6CDD1Dull;
  }

  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Fisher-Yates with j = next() % (i + 1), i counting down.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(next() % i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t state_;
};

}  // namespace enn
