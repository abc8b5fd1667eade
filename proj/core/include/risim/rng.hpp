#pragma once

#include <cstdint>
#include <random>

namespace risim {

using Rng = std::mt19937_64;

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}
} // namespace detail

/// Deterministic seed mixing; order-sensitive so (a,b) != (b,a).
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  return detail::splitmix64(detail::splitmix64(a) ^ (b + 0x9E3779B97F4A7C15ULL));
}

/// Named noise streams within one realization.
enum class RngStream : std::uint64_t {
  Measurement = 1,
  GaussMarkov = 2,
};

/// Generator for one (master seed, realization, stream) triple. Each
/// realization owns its streams, so parallel runs never contend and
/// results do not depend on scheduling.
inline Rng make_stream(std::uint64_t master_seed, std::uint64_t realization,
                       RngStream stream) {
  std::uint64_t s = mix_seed(master_seed, realization);
  s = mix_seed(s, static_cast<std::uint64_t>(stream));
  return Rng(s);
}

} // namespace risim
