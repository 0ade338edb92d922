#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace stew {

using Rng = std::mt19937_64;

/// Independent generator for the named substream `name` of `seed`.
/// Streams differ whenever seed, name or index differ; no ambient entropy is used.
inline Rng make_stream(std::uint64_t seed, std::string_view name, std::uint64_t index = 0) {
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a
  for (unsigned char c : name) {
    h ^= c;
    h *= 1099511628211ull;
  }
  // splitmix64 finalizer over the three words
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  };
  return Rng(mix(mix(mix(seed) ^ h) ^ index));
}

}  // namespace stew
