#pragma once

#include <cstdint>

namespace marten {

// Counter-based deterministic randomness: every draw is a pure function of a
// (seed, step, stream, tag) key, so simulations replay identically regardless
// of evaluation order or thread count.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::uint64_t keyed_hash(std::uint64_t seed, std::uint64_t step,
                                std::uint64_t stream, std::uint64_t tag) {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ step);
  h = mix64(h ^ stream);
  h = mix64(h ^ tag);
  return h;
}

// Uniform double strictly inside (0, 1).  Using 52 bits keeps every value
// (k + 0.5) * 2^-52 exactly representable, so the endpoints are unattainable
// even after rounding (a 53-bit offset would round the top value up to 1.0).
inline double to_unit_interval(std::uint64_t h) {
  return (static_cast<double>(h >> 12) + 0.5) * 0x1.0p-52;
}

inline double keyed_uniform(std::uint64_t seed, std::uint64_t step,
                            std::uint64_t stream, std::uint64_t tag) {
  return to_unit_interval(keyed_hash(seed, step, stream, tag));
}

}  // namespace marten
