#include "s2pc/truncdiv.hpp"

#include "s2pc/bitpack.hpp"
#include "s2pc/compare.hpp"
#include "s2pc/gates.hpp"

namespace s2pc {

namespace {

void check_divisor(const Modulus& ring, u64 d) {
  if (d == 0 || static_cast<u128>(d) >= ring.value()) throw ArgumentError("divisor must satisfy 0 < d < n");
}

// Shares of corr over each ring in `rings`, laid out [element][ring]. m is
// the boolean-shared sign indicator 1{a >= n'} and x the local 1{a_b >= n'}.
std::vector<u64> corr_shares(Session& s, const std::vector<Modulus>& rings, std::span<const u8> m,
                             std::span<const u8> x) {
  size_t N = m.size(), R = rings.size();
  std::vector<unsigned> lanes;
  for (auto& r : rings) lanes.push_back(r.bits());
  std::vector<u64> out(N * R);
  OtFlow f(s);
  size_t h = 0;
  if (s.party() == 0) {
    std::vector<u64> msgs(4 * N * R);
    for (size_t i = 0; i < N; ++i) {
      for (size_t k = 0; k < R; ++k) out[i * R + k] = s.prg().uniform(rings[k]);
      for (u32 j = 0; j < 4; ++j) {
        u8 j0 = j >> 1, j1 = j & 1;
        u8 t = (m[i] ^ j0 ^ x[i]) & (m[i] ^ j0 ^ j1);
        int adj = t ? (x[i] ? 1 : -1) : 0;
        for (size_t k = 0; k < R; ++k)
          msgs[(4 * i + j) * R + k] = rings[k].reduce(adj - static_cast<i128>(out[i * R + k]));
      }
    }
    f.send_kot(4, lanes, std::move(msgs));
  } else {
    std::vector<u32> ch(N);
    for (size_t i = 0; i < N; ++i) ch[i] = static_cast<u32>(m[i]) << 1 | x[i];
    h = f.recv_kot(4, lanes, std::move(ch));
  }
  f.run();
  if (s.party() == 1) out = f.out(h);
  return out;
}

std::vector<u64> divide(Session& s, const Modulus& ring, std::span<const u64> a, u64 d, unsigned delta,
                        int comparisons) {
  size_t N = a.size();
  if (N == 0) return {};
  bool p0 = s.party() == 0;
  u8 b = static_cast<u8>(s.party());
  u64 n0 = static_cast<u64>(ring.value() % d), n1 = static_cast<u64>(ring.value() / d);
  Modulus big = Modulus::pow2(delta);

  auto alpha = drelu(s, ring, a);
  std::vector<u8> m(N), x(N);
  for (size_t i = 0; i < N; ++i) m[i] = alpha[i] ^ b, x[i] = a[i] >= ring.half();
  auto corr = corr_shares(s, {ring, big}, m, x);

  // Comparison inputs A - d, A (and A + d) over Z_Delta, grouped by offset.
  const i128 offsets[3] = {-static_cast<i128>(d), 0, static_cast<i128>(d)};
  std::vector<u64> cmp(comparisons * N);
  for (size_t i = 0; i < N; ++i) {
    i128 A = static_cast<i128>(a[i] % d) - (static_cast<i128>(x[i]) - corr[2 * i + 1]) * n0;
    for (int k = 0; k < comparisons; ++k) cmp[k * N + i] = big.reduce(A + (p0 ? offsets[k] : 0));
  }
  auto gamma = drelu_int(s, big, cmp);
  for (auto& g : gamma) g ^= b;
  auto c = b2a(s, ring, gamma);

  std::vector<u64> z(N);
  for (size_t i = 0; i < N; ++i) {
    i128 B = idiv(static_cast<i128>(a[i] % d) - static_cast<i128>(x[i]) * n0, d);
    i128 C = 0;
    for (int k = 0; k < comparisons; ++k) C += c[k * N + i];
    u64 v = ring.add(rdiv(ring, a[i], d), ring.mul(corr[2 * i], ring.reduce(n1)));
    z[i] = ring.add(v, ring.reduce(static_cast<i128>(b) - C - B));
  }
  return z;
}

}  // namespace

DivDecomposition decompose_division(const Modulus& ring, u64 a0, u64 a1, u64 d) {
  check_divisor(ring, d);
  if (!ring.contains(a0) || !ring.contains(a1)) throw RangeError("share outside the ring");
  DivDecomposition r;
  r.n0 = static_cast<u64>(ring.value() % d);
  r.n1 = static_cast<u64>(ring.value() / d);
  r.delta = ceil_log2(static_cast<u128>(6) * d);
  u64 h = ring.half(), a = ring.add(a0, a1);
  bool x0 = a0 >= h, x1 = a1 >= h;
  if (a >= h && !x0 && !x1) r.corr = -1;
  if (a < h && x0 && x1) r.corr = 1;
  i128 lo0 = a0 % d, lo1 = a1 % d, n0 = r.n0;
  r.A = lo0 + lo1 - (static_cast<i128>(x0) + x1 - r.corr) * n0;
  r.B = idiv(lo0 - x0 * n0, d) + idiv(lo1 - x1 * n0, d);
  r.C = (r.A < static_cast<i128>(d)) + (r.A < 0) + (r.A < -static_cast<i128>(d));
  u64 sum = ring.add(rdiv(ring, a0, d), rdiv(ring, a1, d));
  r.quotient = ring.add(sum, ring.reduce(static_cast<i128>(r.corr) * r.n1 + 1 - r.C - r.B));
  return r;
}

u64 truncation_identity(unsigned l, u64 a0, u64 a1, unsigned s) {
  auto ring = Modulus::pow2(l);
  if (s >= l) throw ArgumentError("shift must be below the bit width");
  if (!ring.contains(a0) || !ring.contains(a1)) throw RangeError("share outside the ring");
  if (s == 0) return ring.add(a0, a1);
  int corr = decompose_division(ring, a0, a1, u64{1} << s).corr;
  u64 lo = low_mask(s);
  u64 carry = (a0 & lo) + (a1 & lo) >= (u64{1} << s);
  u64 v = ring.add(rdiv(ring, a0, u64{1} << s), rdiv(ring, a1, u64{1} << s));
  return ring.add(v, ring.reduce(static_cast<i128>(corr) * (static_cast<i128>(1) << (l - s)) + carry));
}

std::vector<u64> truncate(Session& s, const Modulus& ring, std::span<const u64> a, unsigned shift,
                          bool known_nonnegative) {
  if (!ring.is_pow2()) throw ArgumentError("truncate needs Z_2^l; use div_ring for odd moduli");
  unsigned l = ring.bits();
  if (shift >= l) throw ArgumentError("shift must be below the bit width");
  size_t N = a.size();
  if (shift == 0 || N == 0) return {a.begin(), a.end()};
  u8 b = static_cast<u8>(s.party());
  bool p0 = b == 0;

  std::vector<u8> m(N, 0), x(N);
  if (!known_nonnegative) {
    auto alpha = drelu_int(s, ring, a);
    for (size_t i = 0; i < N; ++i) m[i] = alpha[i] ^ b;
  }
  for (size_t i = 0; i < N; ++i) x[i] = (a[i] >> (l - 1)) & 1;
  auto corr = corr_shares(s, {ring}, m, x);

  u64 lo = low_mask(shift);
  std::vector<u64> low(N);
  for (size_t i = 0; i < N; ++i) low[i] = p0 ? lo - (a[i] & lo) : a[i] & lo;
  auto carry = b2a(s, ring, mill(s, shift, low));

  u64 top = u64{1} << (l - shift);
  std::vector<u64> z(N);
  for (size_t i = 0; i < N; ++i) z[i] = ring.add(ring.add(rdiv(ring, a[i], u64{1} << shift), ring.mul(corr[i], top)), carry[i]);
  return z;
}

std::vector<u64> div_ring(Session& s, const Modulus& ring, std::span<const u64> a, u64 d) {
  check_divisor(ring, d);
  if (d == 1) return {a.begin(), a.end()};
  unsigned delta = ceil_log2(static_cast<u128>(6) * d);
  if (delta > 64) throw ArgumentError("divisor too large for 64-bit comparisons");
  return divide(s, ring, a, d, delta, 3);
}

std::vector<u64> truncate_special_ring(Session& s, const Modulus& ring, std::span<const u64> a, unsigned shift) {
  if (shift == 0 || shift >= 62 || (u128{1} << shift) >= ring.value())
    throw ArgumentError("shift out of range for this ring");
  u64 d = u64{1} << shift;
  if (2 * static_cast<u64>(ring.value() % d) > d) throw ArgumentError("ring does not satisfy 2*(n mod 2^s) <= 2^s");
  return divide(s, ring, a, d, shift + 2, 2);
}

}  // namespace s2pc
