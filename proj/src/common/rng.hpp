#pragma once

#include <cstdint>
#include <random>

namespace aep {

// splitmix64: cheap, well-mixed stream splitter for deriving sub-seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic sub-seed for a named stream of a master seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t s = master ^ (0x9e3779b97f4a7c15ULL * (stream + 1));
  splitmix64(s);
  return splitmix64(s);
}

// Stable stream ids used across the project so runs are reproducible
// regardless of construction order.
namespace seed_stream {
inline constexpr std::uint64_t kPolicyInit = 1;
inline constexpr std::uint64_t kModuleInit = 2;
inline constexpr std::uint64_t kActionSample = 3;
inline constexpr std::uint64_t kMinibatchShuffle = 4;
inline constexpr std::uint64_t kKmeans = 5;
inline constexpr std::uint64_t kEnvBase = 100;  // + env index
}  // namespace seed_stream

inline std::mt19937_64 make_rng(std::uint64_t master, std::uint64_t stream) {
  return std::mt19937_64(derive_seed(master, stream));
}

}  // namespace aep
