#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "s2pc/errors.hpp"

namespace s2pc {

using u8 = std::uint8_t;
using u32 = std::uint32_t;
using u64 = std::uint64_t;
using i64 = std::int64_t;
using i128 = __int128;
using u128 = unsigned __int128;

// Z_{2^l} (1 <= l <= 64) or odd Z_n (3 <= n < 2^62).
class Modulus {
 public:
  static Modulus pow2(unsigned bits);
  static Modulus odd(u64 n);

  bool is_pow2() const { return pow2_; }
  unsigned bits() const { return bits_; }  // l, or ceil(log2 n)
  u128 value() const { return n_; }
  u64 mask() const { return mask_; }       // pow2 only
  u64 half() const { return static_cast<u64>((n_ + 1) / 2); }  // n' = ceil(n/2)
  u64 max() const { return static_cast<u64>(n_ - 1); }

  u64 reduce(i128 v) const;
  u64 add(u64 a, u64 b) const;
  u64 sub(u64 a, u64 b) const;
  u64 mul(u64 a, u64 b) const;
  u64 neg(u64 a) const { return sub(0, a); }

  i128 to_signed(u64 a) const { return a >= half() ? static_cast<i128>(a) - static_cast<i128>(n_) : a; }
  u64 from_signed(i128 v) const { return reduce(v); }
  bool contains(u64 a) const { return static_cast<u128>(a) < n_; }

  std::string str() const;
  bool operator==(const Modulus& o) const { return pow2_ == o.pow2_ && n_ == o.n_; }

 private:
  Modulus(bool pow2, unsigned bits, u128 n, u64 mask) : pow2_(pow2), bits_(bits), n_(n), mask_(mask) {}
  bool pow2_;
  unsigned bits_;
  u128 n_;
  u64 mask_;
};

struct RingValue {
  RingValue(u64 v, const Modulus& m);
  u64 value;
  Modulus mod;

  i128 to_signed() const { return mod.to_signed(value); }
  bool operator==(const RingValue& o) const { return value == o.value && mod == o.mod; }
};

RingValue add(const RingValue& a, const RingValue& b);
RingValue sub(const RingValue& a, const RingValue& b);
RingValue mul(const RingValue& a, const RingValue& b);
RingValue neg(const RingValue& a);

// Floor division, remainder takes the divisor's sign.
i128 idiv(i128 a, i128 d);

// Signed value of a divided by d, rounded toward -inf, reduced into the ring.
u64 rdiv(const Modulus& m, u64 a, u64 d);
RingValue rdiv(const RingValue& a, u64 d);

bool msb(const RingValue& a);

struct FixedScalar {
  RingValue raw;
  unsigned scale;
};

FixedScalar encode_fixed(double x, unsigned s, const Modulus& m);
double decode_fixed(const FixedScalar& f);

unsigned ceil_log2(u128 x);

class Prg {
 public:
  explicit Prg(u64 seed) : eng_(seed) {}
  u64 next() { return eng_(); }
  u64 bits(unsigned w) { return w >= 64 ? eng_() : (eng_() & ((u64{1} << w) - 1)); }
  u8 bit() { return static_cast<u8>(eng_() & 1); }
  u64 below(u64 n) { return std::uniform_int_distribution<u64>(0, n - 1)(eng_); }
  u64 uniform(const Modulus& m) { return m.is_pow2() ? bits(m.bits()) : below(m.max() + 1); }

 private:
  std::mt19937_64 eng_;
};

}  // namespace s2pc
