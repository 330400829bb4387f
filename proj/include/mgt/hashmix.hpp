#pragma once

#include <cstdint>
#include <string>

namespace mgt {

// Deterministic, platform-independent 64-bit hashing used for seeded sampling.
// FNV-1a over the byte stream, then a splitmix64 finalizer for avalanche.
// These constants are part of the on-disk/report contract: changing them
// changes every seeded configuration.

inline std::uint64_t mix64_finalize(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ull;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebull;
  z ^= z >> 31;
  return z;
}

inline std::uint64_t fnv1a(const void* data, std::size_t n,
                           std::uint64_t h = 1469598103934665603ull) {
  auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

inline void append_u64_le(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

// Hash of (seed, coordinate bytes): the value of a seeded iid configuration
// at a coordinate is derived from this and the alphabet's cut points.
inline std::uint64_t coord_hash(std::uint64_t seed, const std::string& coord_bytes) {
  std::uint64_t h = fnv1a("iid", 3);
  std::string s;
  append_u64_le(s, seed);
  h = fnv1a(s.data(), s.size(), h);
  h = fnv1a(coord_bytes.data(), coord_bytes.size(), h);
  return mix64_finalize(h);
}

// Tree split of a seed stream: child #i of `seed`. Never reuse seeds
// sequentially; always derive sample seeds through this.
inline std::uint64_t seed_split(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t h = fnv1a("split", 5);
  std::string s;
  append_u64_le(s, seed);
  append_u64_le(s, index);
  h = fnv1a(s.data(), s.size(), h);
  return mix64_finalize(h);
}

}  // namespace mgt
