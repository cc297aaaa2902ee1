#pragma once

// Reference computations kept independent of the library's arithmetic.

#include <cmath>
#include <cstdint>

namespace s2pc::oracle {

using i128 = __int128;
using u64 = std::uint64_t;

// Floor division by search from the truncated quotient.
inline i128 floor_div(i128 a, i128 d) {
  i128 q = a / d;
  while (q * d > a) --q;
  while ((q + 1) * d <= a) ++q;
  return q;
}

inline i128 signed_of(u64 a, i128 n) { return 2 * static_cast<i128>(a) >= n ? static_cast<i128>(a) - n : a; }

inline u64 mod(i128 v, i128 n) { return static_cast<u64>(((v % n) + n) % n); }

inline u64 ring_div(u64 a, u64 d, i128 n) { return mod(floor_div(signed_of(a, n), d), n); }

// Closed form for the tree comparison cost with q >= 2 and M, R > 2.
inline u64 mill_formula(unsigned l, unsigned m) {
  const u64 lam = 128;
  unsigned q = (l + m - 1) / m, r = l - (q - 1) * m;
  unsigned lg = 0;
  while ((1u << lg) < q) ++lg;
  u64 M = u64{1} << m, R = u64{1} << r;
  return lam * (4 * q - lg - 2) + M * (2 * q - 3) + 2 * R + 22 * (q - 1) - 2 * lg;
}

}  // namespace s2pc::oracle
