#pragma once

#include <cstdint>
#include <random>

namespace qtopo {

// splitmix64 finalizer; used to derive independent per-sample streams from a
// base seed and a counter so results do not depend on scheduling.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  return mix_seed(base ^ mix_seed(index + 0x632be59bd9b4e019ULL));
}

using Rng = std::mt19937_64;

}  // namespace qtopo
