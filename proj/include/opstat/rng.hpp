#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace opstat {

// Philox4x64-10 counter-based generator (Salmon et al., "Parallel random
// numbers: as easy as 1, 2, 3", SC'11), bit-compatible with numpy's
// implementation of the same algorithm -- the known-answer tests pin that.
//
// Seeding: every generator in this project is keyed by
//     key = (master seed, stream id)
// with the 256-bit counter starting at zero. Stream ids compose a purpose
// tag (high 32 bits) with an index (low 32 bits), so parallel trials get
// independent, reproducible streams: see stream_id() below.
class Philox {
 public:
  explicit Philox(std::uint64_t seed, std::uint64_t stream = 0)
      : key_{seed, stream} {}

  std::uint64_t next_u64();

  // Uniform on [0, 1), 53-bit resolution.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0, 1]; safe under log().
  double next_double_open() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; generates pairs, caches the second.
  double next_normal();

  // Exponential with the given rate (mean 1/rate).
  double next_exponential(double rate);

  // Index in [0, cumulative.size()) drawn with probabilities proportional
  // to the increments of `cumulative` (a nondecreasing sequence ending at
  // the total weight).
  std::size_t next_categorical(const std::vector<double>& cumulative);

 private:
  void advance_block();

  std::array<std::uint64_t, 4> ctr_{0, 0, 0, 0};
  std::array<std::uint64_t, 2> key_;
  std::array<std::uint64_t, 4> block_{};
  int idx_ = 4;
  bool has_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

// Purpose tags for derived sub-streams. Keeping them centralized prevents
// accidental stream collisions between modules.
enum class Stream : std::uint32_t {
  kDefault = 0,
  kPoissonJumps = 1,
  kPoissonCells = 2,
  kSigmaTrial = 3,
  kSdePath = 4,
  kChannelSample = 5,
  kOptimizerRestart = 6,
  kCodecCount = 7,
  kCodecPoints = 8,
  kCodecWalk = 9,
  kCodecSeed = 10,
  kRandomOperator = 11,
};

constexpr std::uint64_t stream_id(Stream purpose, std::uint64_t index = 0) {
  return (static_cast<std::uint64_t>(purpose) << 32) | (index & 0xffffffffull);
}

}  // namespace opstat
