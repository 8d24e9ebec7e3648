#pragma once

#include <cstdint>
#include <random>

namespace cqca {

/// Deterministic random source owned by one simulation lane.
///
/// Lanes are derived from a run seed plus a (round, purpose) pair so that
/// rounds can be evaluated in any order or in parallel and still produce
/// identical draws.
class RandomStream {
 public:
  enum class Purpose : std::uint64_t { Quantum = 1, Bob = 2, Charlie = 3, Eve = 4, Alice = 5, Sampling = 6 };

  explicit RandomStream(std::uint64_t seed);

  static RandomStream forLane(std::uint64_t seed, std::uint64_t round, Purpose purpose);

  /// Uniform in [0, 1).
  double uniform();
  bool bernoulli(double p) { return uniform() < p; }
  std::uint64_t below(std::uint64_t bound);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace cqca
