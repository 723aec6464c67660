#pragma once

#include <cstdint>
#include <random>

namespace cwe {

// SplitMix64 finalizer (Steele, Lea, Flood 2014). Used for seed derivation
// only; actual variates come from std::mt19937_64, whose output sequence is
// fixed by the C++ standard.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Order-sensitive combination of two 64-bit words.
constexpr std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value) noexcept {
  return splitmix64(seed ^ splitmix64(value + 0x632BE59BD9B4E019ULL));
}

/// Seed of the independent stream number `stream` derived from `seed`.
constexpr std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  return hash_combine(hash_combine(seed, 0x5EEDULL), stream);
}

/// Stream generator, versioned as "mt19937_64/splitmix64-v1".
class Stream {
 public:
  static constexpr const char* kName = "mt19937_64/splitmix64-v1";

  Stream(std::uint64_t seed, std::uint64_t stream) : engine_(stream_seed(seed, stream)) {}

  /// Uniform double in [0, 1) with 53 random bits.
  double next_unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound) without modulo bias. bound must be > 0.
  std::uint64_t next_below(std::uint64_t bound);

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace cwe
