#pragma once

#include <cstdint>
#include <stdexcept>

#include <Eigen/Core>

namespace acgap {

// Splittable counter-based generator (splitmix64 core). Every experiment
// derives all of its randomness from one 64-bit seed; child streams obtained
// via split() are decorrelated and independent of how much the parent has
// been consumed, so traces are bit-reproducible. Not cryptographic.
class SplitRng {
 public:
  explicit SplitRng(std::uint64_t seed) : state_(seed) {}

  // Child generator for a named stream. Does not advance this generator.
  SplitRng split(std::uint64_t stream) const {
    return SplitRng(mix(state_ ^ mix(0x9E3779B97F4A7C15ULL * (stream + 1))));
  }

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  int uniform_int(int n) {
    if (n <= 0) throw std::invalid_argument("uniform_int: n must be positive");
    return static_cast<int>(next_u64() % static_cast<std::uint64_t>(n));
  }

  // Sample an index from an unnormalized nonnegative weight vector.
  int categorical(const Eigen::Ref<const Eigen::VectorXd>& weights) {
    const double total = weights.sum();
    if (!(total > 0.0)) throw std::invalid_argument("categorical: weights must have positive mass");
    double u = uniform() * total;
    for (Eigen::Index i = 0; i < weights.size(); ++i) {
      u -= weights[i];
      if (u < 0.0) return static_cast<int>(i);
    }
    return static_cast<int>(weights.size() - 1);  // guards accumulated rounding
  }

  Eigen::VectorXd uniform_vector(Eigen::Index n, double lo, double hi) {
    Eigen::VectorXd out(n);
    for (Eigen::Index i = 0; i < n; ++i) out[i] = uniform(lo, hi);
    return out;
  }

  // Flat Dirichlet(1,...,1) draw: normalized unit exponentials.
  Eigen::VectorXd dirichlet_uniform(Eigen::Index n) {
    Eigen::VectorXd out(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      double u = uniform();
      while (u <= 0.0) u = uniform();
      out[i] = -std::log(u);
    }
    return out / out.sum();
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t state_;
};

}  // namespace acgap
