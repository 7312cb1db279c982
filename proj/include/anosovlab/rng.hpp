#pragma once

#include <cstdint>
#include <random>

#include "anosovlab/geometry.hpp"

namespace anosovlab {

// Deterministic uniform generator. std::mt19937_64 is fully specified by the
// standard; the double conversion is done explicitly because
// uniform_real_distribution is not bit-stable across implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform() {  // in [0,1)
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  TorusPoint torus_point() {
    return TorusPoint(uniform(), uniform(), uniform());
  }

  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace anosovlab
