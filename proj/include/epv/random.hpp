#pragma once

#include <cstdint>
#include <random>

namespace epv {

// mt19937_64 is fully specified by the standard; the unit-interval mapping
// below is too, unlike std::uniform_real_distribution. Together they give
// identical streams on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace epv
