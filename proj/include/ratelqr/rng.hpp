#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace ratelqr {

// splitmix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Weyl-sequence generator with the splitmix64 mix. Construction is O(1), so
// a fresh engine can be keyed for every (replication, lane, stage) draw.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  constexpr result_type operator()() noexcept {
    state_ += 0x9e3779b97f4a7c15ull;
    return mix64(state_);
  }

 private:
  std::uint64_t state_;
};

// Folds a key path into a master seed. Distinct paths yield decorrelated
// streams; the same path always yields the same stream.
template <typename... Parts>
constexpr std::uint64_t derive_seed(std::uint64_t master, Parts... parts) noexcept {
  std::uint64_t key = mix64(master + 0x9e3779b97f4a7c15ull);
  ((key = mix64(key ^ (0x9e3779b97f4a7c15ull *
                       (static_cast<std::uint64_t>(parts) + 1)))),
   ...);
  return key;
}

inline double standard_normal(SplitMix64& rng) {
  std::normal_distribution<double> dist;
  return dist(rng);
}

// Hands out one independent stream per (lane, stage) of a Monte Carlo
// replication. Streams are derived from the key path alone, so replications
// draw identical noise no matter which thread runs them or in what order.
class ReplicationStream {
 public:
  ReplicationStream(std::uint64_t master_seed, std::uint64_t replication) noexcept
      : master_(master_seed), replication_(replication) {}

  SplitMix64 process_noise(std::size_t stage) const noexcept {
    return SplitMix64(derive_seed(master_, replication_, kProcessLane, stage));
  }

  SplitMix64 compression_noise(std::size_t stage) const noexcept {
    return SplitMix64(derive_seed(master_, replication_, kCompressionLane, stage));
  }

 private:
  static constexpr std::uint64_t kProcessLane = 0x5a;
  static constexpr std::uint64_t kCompressionLane = 0xc3;

  std::uint64_t master_;
  std::uint64_t replication_;
};

}  // namespace ratelqr
