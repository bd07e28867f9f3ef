#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

#include "lipstream/uuid.hpp"

namespace lipstream {

// splitmix64: cheap, well-mixed 64-bit stream used for all derived
// randomness. Every consumer derives its values from (seed, purpose, index)
// so adding a consumer never perturbs another's stream.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t mix_u64(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  std::uint64_t s = h;
  return splitmix64(s);
}

inline std::uint64_t mix_str(std::uint64_t h, std::string_view s) {
  for (char c : s) h = mix_u64(h, static_cast<std::uint8_t>(c));
  return h;
}

inline std::uint64_t mix_uuid(std::uint64_t h, const Uuid& u) {
  for (auto b : u.bytes) h = mix_u64(h, b);
  return h;
}

// Uniform in [0, 1) with 53-bit resolution.
inline double u64_to_unit(std::uint64_t v) {
  return std::ldexp(static_cast<double>(v >> 11), -53);
}

// Deterministic id for segment `counter` of stream `stream` under `seed`.
inline Uuid derive_uuid(std::uint64_t seed, std::uint64_t stream,
                        std::uint64_t counter) {
  std::uint64_t hi = mix_u64(mix_u64(seed, 0x5eedu), stream);
  std::uint64_t lo = mix_u64(hi, counter);
  return Uuid::from_u64_pair(mix_u64(hi, counter + 1), lo);
}

}  // namespace lipstream
