#include "polarmc/rng.hpp"

namespace polarmc {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> c,
                                           std::array<std::uint32_t, 2> k) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      k[0] += kWeyl0;
      k[1] += kWeyl1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, c[0], hi0, lo0);
    mulhilo(kMul1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
  return c;
}

std::uint64_t compose_stream(StreamTag tag, std::uint64_t index) {
  return (static_cast<std::uint64_t>(tag) << 48) ^ (index & ((std::uint64_t{1} << 48) - 1));
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      stream_(stream_id) {}

RngStream::RngStream(std::uint64_t seed, StreamTag tag, std::uint64_t index)
    : RngStream(seed, compose_stream(tag, index)) {}

void RngStream::refill() {
  buffer_ = philox4x32_10({static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                           static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)},
                          key_);
  ++block_;
  used_ = 0;
}

RngStream::result_type RngStream::operator()() {
  if (used_ == 4) refill();
  return buffer_[used_++];
}

double RngStream::uniform01() {
  const std::uint64_t a = (*this)() >> 5;
  const std::uint64_t b = (*this)() >> 6;
  return static_cast<double>((a << 26) | b) * 0x1.0p-53;
}

}  // namespace polarmc
