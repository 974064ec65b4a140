// Seeded random number utilities. Every stochastic operation takes either an
// explicit seed or an engine reference; nothing reads global state, so runs
// are reproducible bit for bit.

#pragma once

#include <cstdint>
#include <random>

namespace connie {

using rng_t = std::mt19937_64;

namespace detail {

// splitmix64 finalizer, used to decorrelate seeds derived from
// (master seed, stream id) pairs.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

} // namespace detail

/// Engine seeded directly from a user-facing seed.
inline rng_t make_rng(std::uint64_t seed) { return rng_t(detail::mix64(seed)); }

/// Independent engine for stream `id` under a master seed. Used for
/// per-cascade streams so results do not depend on scheduling order.
inline rng_t make_stream(std::uint64_t master_seed, std::uint64_t id) {
  return rng_t(detail::mix64(detail::mix64(master_seed) ^ (id + 1)));
}

/// Uniform draw from the open interval (0, 1); safe as input to inverse CDFs
/// that must return strictly positive values.
inline double uniform_open01(rng_t& rng) {
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  double u = dist(rng);
  while (u == 0.0) u = dist(rng);
  return u;
}

} // namespace connie
