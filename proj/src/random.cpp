#include "cqca/random.hpp"

namespace cqca {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

RandomStream::RandomStream(std::uint64_t seed) : engine_(splitmix64(seed)) {}

RandomStream RandomStream::forLane(std::uint64_t seed, std::uint64_t round, Purpose purpose) {
  const std::uint64_t mixed = splitmix64(splitmix64(seed) ^ splitmix64(round * 8 + static_cast<std::uint64_t>(purpose)));
  return RandomStream(mixed);
}

double RandomStream::uniform() {
  // 53 random mantissa bits; avoids the implementation-defined generate_canonical.
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t RandomStream::below(std::uint64_t bound) {
  // Plain rejection sampling; std::uniform_int_distribution differs between standard libraries.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % bound;
}

}  // namespace cqca
