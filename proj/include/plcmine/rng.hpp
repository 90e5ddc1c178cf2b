#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace plcmine {

/// Identifier of the pseudo-random stream used by the stochastic plant. Any
/// reimplementation that reproduces this identifier reproduces trajectories
/// bit for bit: mt19937_64 output, uniforms from the top 53 bits, normals by
/// the cosine branch of Box-Muller on two fresh uniforms.
inline constexpr std::string_view kRngAlgorithm = "mt19937_64/u53/box-muller-cos";

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform01();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  double normal(double mean, double std_dev);
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return engine_() % n; }

 private:
  std::mt19937_64 engine_;
};

/// splitmix64 finaliser; used to derive documented sub-seeds from one seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace plcmine
