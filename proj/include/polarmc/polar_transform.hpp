// The Arikan transform x = u G_n over GF(2).
//
// G_n is the Kronecker power of [[1,0],[1,1]] in its block form
// G_n = [[G_{n/2}, 0], [G_{n/2}, G_{n/2}]] with no bit-reversal permutation,
// so u[i] multiplies row i of that matrix. G_n is its own inverse.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace polarmc {

using BitVec = std::vector<std::uint8_t>;

bool is_power_of_two(std::size_t n);

/// log2(n); throws std::invalid_argument unless n is a power of two.
int checked_log2(std::size_t n);

/// In-place butterfly, O(n log n) XORs.
void polar_transform_inplace(std::span<std::uint8_t> bits);

BitVec polar_transform(BitVec u);

/// Identical computation to polar_transform.
BitVec polar_inverse(BitVec x);

/// Dense reference: builds G_n explicitly and multiplies. n <= 1024.
BitVec polar_transform_dense(const BitVec& u);

}  // namespace polarmc
