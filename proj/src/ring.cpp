#include "s2pc/ring.hpp"

#include <cmath>

namespace s2pc {

unsigned ceil_log2(u128 x) {
  unsigned k = 0;
  while ((u128{1} << k) < x) ++k;
  return k;
}

Modulus Modulus::pow2(unsigned bits) {
  if (bits < 1 || bits > 64) throw ArgumentError("pow2 modulus needs 1..64 bits");
  u64 mask = bits == 64 ? ~u64{0} : (u64{1} << bits) - 1;
  return Modulus(true, bits, u128{1} << bits, mask);
}

Modulus Modulus::odd(u64 n) {
  if (n < 3 || n % 2 == 0 || n >= (u64{1} << 62)) throw ArgumentError("odd modulus must be odd, 3 <= n < 2^62");
  return Modulus(false, ceil_log2(n), n, 0);
}

u64 Modulus::reduce(i128 v) const {
  if (pow2_) return static_cast<u64>(v) & mask_;
  i128 n = static_cast<i128>(n_);
  i128 r = v % n;
  if (r < 0) r += n;
  return static_cast<u64>(r);
}

u64 Modulus::add(u64 a, u64 b) const {
  if (pow2_) return (a + b) & mask_;
  u128 s = static_cast<u128>(a) + b;
  return static_cast<u64>(s >= n_ ? s - n_ : s);
}

u64 Modulus::sub(u64 a, u64 b) const {
  if (pow2_) return (a - b) & mask_;
  return a >= b ? a - b : static_cast<u64>(n_ - b + a);
}

u64 Modulus::mul(u64 a, u64 b) const {
  if (pow2_) return (a * b) & mask_;
  return static_cast<u64>((static_cast<u128>(a) * b) % n_);
}

std::string Modulus::str() const {
  if (pow2_) return "Z_2^" + std::to_string(bits_);
  return "Z_" + std::to_string(static_cast<u64>(n_));
}

RingValue::RingValue(u64 v, const Modulus& m) : value(v), mod(m) {
  if (!m.contains(v)) throw RangeError("ring value out of range for " + m.str());
}

static void same_ring(const RingValue& a, const RingValue& b) {
  if (!(a.mod == b.mod)) throw ArgumentError("modulus mismatch");
}

RingValue add(const RingValue& a, const RingValue& b) {
  same_ring(a, b);
  return {a.mod.add(a.value, b.value), a.mod};
}

RingValue sub(const RingValue& a, const RingValue& b) {
  same_ring(a, b);
  return {a.mod.sub(a.value, b.value), a.mod};
}

RingValue mul(const RingValue& a, const RingValue& b) {
  same_ring(a, b);
  return {a.mod.mul(a.value, b.value), a.mod};
}

RingValue neg(const RingValue& a) { return {a.mod.neg(a.value), a.mod}; }

i128 idiv(i128 a, i128 d) {
  if (d == 0) throw DivisionByZero("idiv by zero");
  i128 q = a / d;
  i128 r = a % d;
  if (r != 0 && ((r < 0) != (d < 0))) --q;
  return q;
}

u64 rdiv(const Modulus& m, u64 a, u64 d) {
  if (d == 0 || static_cast<u128>(d) >= m.value()) throw ArgumentError("rdiv divisor out of range");
  return m.reduce(idiv(m.to_signed(a), d));
}

RingValue rdiv(const RingValue& a, u64 d) { return {rdiv(a.mod, a.value, d), a.mod}; }

bool msb(const RingValue& a) {
  if (!a.mod.is_pow2()) throw ArgumentError("msb needs a power-of-two modulus");
  return (a.value >> (a.mod.bits() - 1)) & 1;
}

FixedScalar encode_fixed(double x, unsigned s, const Modulus& m) {
  long double v = std::floor(std::ldexp(static_cast<long double>(x), static_cast<int>(s)));
  long double bound = static_cast<long double>(m.value() / 2);
  if (!std::isfinite(v) || std::fabs(v) >= bound) throw RangeError("fixed-point value overflows ring");
  return {RingValue(m.reduce(static_cast<i128>(v)), m), s};
}

double decode_fixed(const FixedScalar& f) {
  return std::ldexp(static_cast<double>(f.raw.to_signed()), -static_cast<int>(f.scale));
}

}  // namespace s2pc
