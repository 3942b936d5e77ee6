#pragma once

#include <bit>
#include <cstdint>
#include <random>

namespace cardsim {

// splitmix64 finalizer, used only for seed mixing. Stateless, bijective.
inline constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Uniform double stream over a mt19937_64 engine. The engine's output is
// pinned down by the C++ standard, so a seed reproduces the same draws
// everywhere; distribution sampling elsewhere is inverse-transform only,
// never std::*_distribution, to keep that guarantee.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Strictly inside (0,1): (k + 1/2) * 2^-53 with k < 2^53.
  double next01() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Uniform on {0, ..., n-1}.
  int next_index(int n) {
    int i = static_cast<int>(next01() * static_cast<double>(n));
    return i < n ? i : n - 1;
  }

  double next_exponential(double rate) {
    return -std::log(next01()) / rate;
  }

 private:
  std::mt19937_64 engine_;
};

// Per-trial substreams. Derivation depends only on (root seed, rho, trial
// index), never on the policy, so every policy simulated at the same load
// point sees the identical arrival and size sequence (common random numbers).
// The policy stream exists so that randomized dispatch cannot consume draws
// from the other two.
struct TrialStreams {
  RandomStream interarrival;
  RandomStream size;
  RandomStream policy;
};

inline TrialStreams make_trial_streams(std::uint64_t root_seed, double rho,
                                       std::uint64_t trial_index) {
  std::uint64_t h = mix64(root_seed);
  h = mix64(h ^ std::bit_cast<std::uint64_t>(rho));
  h = mix64(h ^ trial_index);
  return TrialStreams{RandomStream(mix64(h ^ 1)), RandomStream(mix64(h ^ 2)),
                      RandomStream(mix64(h ^ 3))};
}

}  // namespace cardsim
