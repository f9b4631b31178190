#include "polarmc/polar_transform.hpp"

#include <bit>
#include <stdexcept>
#include <string>

namespace polarmc {

bool is_power_of_two(std::size_t n) { return std::has_single_bit(n); }

int checked_log2(std::size_t n) {
  if (!is_power_of_two(n))
    throw std::invalid_argument("block length " + std::to_string(n) + " is not a power of 2");
  return std::countr_zero(n);
}

void polar_transform_inplace(std::span<std::uint8_t> bits) {
  const std::size_t n = bits.size();
  checked_log2(n);
  for (std::size_t h = 1; h < n; h <<= 1)
    for (std::size_t i = 0; i < n; i += 2 * h)
      for (std::size_t j = i; j < i + h; ++j) bits[j] ^= bits[j + h];
}

BitVec polar_transform(BitVec u) {
  polar_transform_inplace(u);
  return u;
}

BitVec polar_inverse(BitVec x) { return polar_transform(std::move(x)); }

BitVec polar_transform_dense(const BitVec& u) {
  const std::size_t n = u.size();
  checked_log2(n);
  if (n > 1024) throw std::invalid_argument("polar_transform_dense: n too large");

  std::vector<BitVec> g(1, BitVec{1});
  for (std::size_t size = 1; size < n; size *= 2) {
    std::vector<BitVec> next(2 * size, BitVec(2 * size, 0));
    for (std::size_t r = 0; r < size; ++r)
      for (std::size_t c = 0; c < size; ++c) {
        next[r][c] = g[r][c];
        next[r + size][c] = g[r][c];
        next[r + size][c + size] = g[r][c];
      }
    g = std::move(next);
  }

  BitVec x(n, 0);
  for (std::size_t r = 0; r < n; ++r)
    if (u[r] & 1)
      for (std::size_t c = 0; c < n; ++c) x[c] ^= g[r][c];
  return x;
}

}  // namespace polarmc
