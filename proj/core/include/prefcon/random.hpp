#pragma once

// Platform-stable seeded randomness. The standard distributions are
// implementation-defined, so range reduction and shuffling are done here on
// top of the fully specified mt19937_64 engine.

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace prefcon {

/// FNV-1a over `text`, finalised with splitmix64 and mixed with `seed`.
std::uint64_t stable_hash(std::string_view text, std::uint64_t seed = 0);

class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}
  SeededRng(std::uint64_t seed, std::string_view stream) : engine_(stable_hash(stream, seed)) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform integer in [0, bound). `bound` must be positive.
  std::uint64_t below(std::uint64_t bound);
  /// Uniform double in [0, 1) with 53 random bits.
  double unit();
  /// Uniform random permutation of 0..n-1 (Fisher-Yates).
  std::vector<std::size_t> permutation(std::size_t n);

 private:
  std::mt19937_64 engine_;
};

}  // namespace prefcon
