#pragma once

#include <cstdint>
#include <random>

namespace bht {

// splitmix64 finalizer; decorrelates (master seed, task index) pairs
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ull * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::mt19937_64 task_rng(std::uint64_t master, std::uint64_t index) {
  return std::mt19937_64(mix_seed(master, index));
}

}  // namespace bht
