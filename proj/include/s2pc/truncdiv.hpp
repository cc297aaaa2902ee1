#pragma once

#include <span>
#include <vector>

#include "s2pc/session.hpp"

namespace s2pc {

// Terms of the share-wise division identity
//   rdiv(a0, d) + rdiv(a1, d) + corr*n1 + 1 - C - B = rdiv(a0 + a1, d)  (mod n)
// for n = n1*d + n0.
struct DivDecomposition {
  int corr = 0;
  i128 A = 0, B = 0, C = 0;
  u64 n0 = 0, n1 = 0;
  unsigned delta = 0;  // ceil(log2 6d)
  u64 quotient = 0;    // left-hand side of the identity, reduced mod n
};

// Cleartext evaluation of the identity; used as a test oracle.
DivDecomposition decompose_division(const Modulus& ring, u64 a0, u64 a1, u64 d);

// Cleartext right shift of a shared l-bit value assembled from its shares:
// (a0 >> s) + (a1 >> s) + corr*2^(l-s) + 1{low bits carry}, where the share
// shifts are arithmetic.
u64 truncation_identity(unsigned l, u64 a0, u64 a1, unsigned s);

// Shares of a >> s (arithmetic shift) over Z_2^l. With known_nonnegative the
// sign computation is skipped; the caller guarantees signed(a) >= 0.
std::vector<u64> truncate(Session& s, const Modulus& ring, std::span<const u64> a, unsigned shift,
                          bool known_nonnegative = false);

// Shares of rdiv(a, d) over Z_2^l or odd Z_n. Requires 0 < d < n and 6d <= 2^64.
std::vector<u64> div_ring(Session& s, const Modulus& ring, std::span<const u64> a, u64 d);

// Division by 2^shift using two correction comparisons instead of three.
// Requires 2*(n mod 2^shift) <= 2^shift.
std::vector<u64> truncate_special_ring(Session& s, const Modulus& ring, std::span<const u64> a, unsigned shift);

}  // namespace s2pc
