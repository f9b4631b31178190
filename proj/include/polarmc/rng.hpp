// Counter-based random streams.
//
// Philox4x32-10 keyed by the 64-bit root seed. The 128-bit counter is split
// into a 64-bit block counter and a 64-bit stream id, so every (seed, stream)
// pair is an independent, reproducible sequence no matter which worker draws
// it. Stream ids are composed from a purpose tag and an index.

#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace polarmc {

inline constexpr const char* kRngName = "philox4x32-10/v1";

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

/// Purposes that get disjoint stream families under one root seed.
enum class StreamTag : std::uint16_t {
  kEstimate = 1,
  kFrozenCandidate = 2,
  kFrozenBatch = 3,
  kTrial = 4,
  kTest = 5,
};

class RngStream {
 public:
  using result_type = std::uint32_t;

  RngStream(std::uint64_t seed, std::uint64_t stream_id);
  RngStream(std::uint64_t seed, StreamTag tag, std::uint64_t index);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01();

  std::uint8_t bit() { return static_cast<std::uint8_t>((*this)() >> 31); }

  /// True with probability p (p <= 0 never, p >= 1 always).
  bool bernoulli(double p) { return uniform01() < p; }

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 4;
};

std::uint64_t compose_stream(StreamTag tag, std::uint64_t index);

}  // namespace polarmc
