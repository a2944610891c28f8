#ifndef DUET_RNG_HPP
#define DUET_RNG_HPP

#include <cstdint>

// Counter-based random streams for reproducible parallel Monte Carlo.
//
// Every stream is addressed by (master_seed, trajectory_index, channel) and
// produces a sequence that depends only on that address and the draw counter,
// never on thread scheduling or on how many other streams exist.

namespace duet::rng {

// SplitMix64 finalizer (Stafford mix13).
constexpr std::uint64_t avalanche64(std::uint64_t z) noexcept {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// Stream addressing: chain the avalanche over the address words.
constexpr std::uint64_t derive_stream_seed(std::uint64_t master_seed,
                                           std::uint64_t trajectory_index,
                                           std::uint64_t channel) noexcept {
  std::uint64_t z = avalanche64(master_seed + kGolden);
  z = avalanche64(z + trajectory_index * kGolden);
  z = avalanche64(z + channel * kGolden);
  return z;
}

// Quantile function of the standard normal (Wichura's AS 241, PPND16).
// Absolute error below 1e-15 for p in (0,1).
double inverse_normal_cdf(double p) noexcept;

// One channel of Gaussian draws. Draw i is a pure function of (seed, i):
// uniform = bits of avalanche64(seed + (i+1)*golden), mapped through the
// normal quantile. The cursor is the only mutable state.
class GaussianStream {
 public:
  GaussianStream() noexcept : seed_(0), cursor_(0) {}
  GaussianStream(std::uint64_t master_seed, std::uint64_t trajectory_index,
                 std::uint64_t channel) noexcept
      : seed_(derive_stream_seed(master_seed, trajectory_index, channel)),
        cursor_(0) {}

  double next_uniform() noexcept {
    const std::uint64_t bits = avalanche64(seed_ + (++cursor_) * kGolden);
    // 53 high bits, offset by half an ulp so the result is in (0,1).
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
  }

  double next_gaussian() noexcept { return inverse_normal_cdf(next_uniform()); }

  std::uint64_t cursor() const noexcept { return cursor_; }

 private:
  std::uint64_t seed_;
  std::uint64_t cursor_;
};

// Channel assignment for one trajectory.
enum : std::uint64_t { kChannelW1 = 0, kChannelW2 = 1, kChannelInit = 2 };

// The pair of independent driving noises of one trajectory, plus a separate
// channel for randomized initial conditions.
class NoiseStream {
 public:
  NoiseStream(std::uint64_t master_seed, std::uint64_t trajectory_index) noexcept
      : master_seed_(master_seed),
        trajectory_index_(trajectory_index),
        w1_(master_seed, trajectory_index, kChannelW1),
        w2_(master_seed, trajectory_index, kChannelW2),
        init_(master_seed, trajectory_index, kChannelInit) {}

  double gauss_w1() noexcept { return w1_.next_gaussian(); }
  double gauss_w2() noexcept { return w2_.next_gaussian(); }
  double gauss_init() noexcept { return init_.next_gaussian(); }
  double uniform_init() noexcept { return init_.next_uniform(); }

  std::uint64_t master_seed() const noexcept { return master_seed_; }
  std::uint64_t trajectory_index() const noexcept { return trajectory_index_; }

 private:
  std::uint64_t master_seed_;
  std::uint64_t trajectory_index_;
  GaussianStream w1_, w2_, init_;
};

}  // namespace duet::rng

#endif  // DUET_RNG_HPP
