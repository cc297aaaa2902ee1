#include "s2pc/compare.hpp"

#include <algorithm>

#include "s2pc/bitpack.hpp"

namespace s2pc {

MillParams MillParams::make(unsigned bits, unsigned m) {
  if (bits == 0 || bits > 64) throw ArgumentError("comparison bit length must be 1..64");
  if (m < 1 || m > 8) throw ArgumentError("leaf size m must be 1..8");
  m = std::min(m, bits);
  unsigned q = (bits + m - 1) / m;
  return {bits, m, q, bits - (q - 1) * m};
}

CompareTree CompareTree::make(unsigned q) {
  CompareTree t;
  t.nodes.resize(q);
  t.nodes[0].leftmost = true;
  auto build = [&](auto&& self, int first, int count) -> int {
    if (count == 1) return first;
    int p = 1;
    while (2 * p < count) p *= 2;
    int lo = self(self, first, p);
    int hi = self(self, first + p, count - p);
    Node n;
    n.lo = lo;
    n.hi = hi;
    n.level = std::max(t.nodes[lo].level, t.nodes[hi].level) + 1;
    n.leftmost = t.nodes[lo].leftmost;
    t.nodes.push_back(n);
    (n.leftmost ? t.regular_ands : t.paired_ands) += 1;
    return static_cast<int>(t.nodes.size()) - 1;
  };
  t.root = build(build, 0, static_cast<int>(q));
  t.depth = t.nodes[t.root].level;
  return t;
}

std::vector<u8> mill_shared_receiver(Session& s, unsigned bits, unsigned t, std::span<const u64> inputs,
                                     unsigned m) {
  MillParams P = MillParams::make(bits, m ? m : s.mill_m());
  if (t < 1 || t > 32) throw ArgumentError("shared-receiver batch needs 1 <= t <= 32");
  bool p0 = s.party() == 0;
  if (p0 && inputs.size() % t) throw ArgumentError("party 0 needs t inputs per instance");
  size_t N = p0 ? inputs.size() / t : inputs.size();
  u64 lim = low_mask(bits);
  for (u64 v : inputs)
    if (v > lim) throw ArgumentError("comparison input exceeds bit length");
  if (N == 0) return {};

  CompareTree T = CompareTree::make(P.q);
  size_t NT = N * t;
  std::vector<std::vector<u8>> lt(T.nodes.size()), eq(T.nodes.size());

  OtFlow flow(s);
  std::vector<size_t> handle(P.q);
  for (unsigned j = 0; j < P.q; ++j) {
    unsigned bj = P.leaf_bits(j);
    u32 k = u32{1} << bj;
    unsigned w = j == 0 ? 1 : 2;
    unsigned shift = j * P.m;
    lt[j].resize(NT);
    if (w == 2) eq[j].resize(NT);
    if (p0) {
      for (size_t i = 0; i < NT; ++i) {
        lt[j][i] = s.prg().bit();
        if (w == 2) eq[j][i] = s.prg().bit();
      }
      std::vector<u64> msgs(N * k);
      for (size_t i = 0; i < N; ++i)
        for (unsigned c = 0; c < t; ++c) {
          size_t it = i * t + c;
          u64 x = (inputs[it] >> shift) & (k - 1);
          for (u32 v = 0; v < k; ++v) {
            u64 word = lt[j][it] ^ (x < v);
            if (w == 2) word |= static_cast<u64>(eq[j][it] ^ (x == v)) << 1;
            msgs[i * k + v] |= word << (w * c);
          }
        }
      flow.send_kot(k, {w * t}, std::move(msgs));
    } else {
      std::vector<u32> ch(N);
      for (size_t i = 0; i < N; ++i) ch[i] = static_cast<u32>((inputs[i] >> shift) & (k - 1));
      handle[j] = flow.recv_kot(k, {w * t}, std::move(ch));
    }
  }
  TripleGen tg(s, flow, NT * T.regular_ands, NT * T.paired_ands);
  flow.run();
  if (!p0) {
    for (unsigned j = 0; j < P.q; ++j) {
      unsigned w = j == 0 ? 1 : 2;
      const auto& o = flow.out(handle[j]);
      for (size_t i = 0; i < N; ++i)
        for (unsigned c = 0; c < t; ++c) {
          u64 word = o[i] >> (w * c);
          lt[j][i * t + c] = word & 1;
          if (w == 2) eq[j][i * t + c] = (word >> 1) & 1;
        }
    }
  }
  auto reg = tg.regular();
  auto pairs = tg.pairs();
  size_t next_reg = 0, next_pair = 0;

  for (int level = 1; level <= T.depth; ++level) {
    AndBatch b;
    std::vector<std::pair<int, size_t>> placed;
    for (size_t id = P.q; id < T.nodes.size(); ++id) {
      const auto& n = T.nodes[id];
      if (n.level != level) continue;
      placed.push_back({static_cast<int>(id), b.size()});
      for (size_t i = 0; i < NT; ++i) {
        if (n.leftmost)
          b.add(eq[n.hi][i], lt[n.lo][i], reg[next_reg++]);
        else
          b.add_pair(lt[n.lo][i], eq[n.lo][i], eq[n.hi][i], pairs[next_pair++]);
      }
    }
    b.run(s);
    for (auto [id, base] : placed) {
      const auto& n = T.nodes[id];
      lt[id].resize(NT);
      if (!n.leftmost) eq[id].resize(NT);
      size_t step = n.leftmost ? 1 : 2;
      for (size_t i = 0; i < NT; ++i) {
        lt[id][i] = lt[n.hi][i] ^ b.result(base + step * i);
        if (!n.leftmost) eq[id][i] = b.result(base + step * i + 1);
      }
    }
  }
  return std::move(lt[T.root]);
}

std::vector<u8> mill(Session& s, unsigned bits, std::span<const u64> inputs, unsigned m) {
  return mill_shared_receiver(s, bits, 1, inputs, m);
}

std::vector<u8> drelu_int(Session& s, const Modulus& ring, std::span<const u64> a) {
  if (!ring.is_pow2() || ring.bits() < 2) throw ArgumentError("drelu_int needs Z_2^l with l >= 2");
  unsigned l = ring.bits();
  u64 low = low_mask(l - 1);
  std::vector<u64> in(a.size());
  for (size_t i = 0; i < a.size(); ++i) in[i] = s.party() == 0 ? low - (a[i] & low) : a[i] & low;
  auto carry = mill(s, l - 1, in);
  std::vector<u8> out(a.size());
  u8 b = static_cast<u8>(s.party());
  for (size_t i = 0; i < a.size(); ++i) out[i] = static_cast<u8>(((a[i] >> (l - 1)) & 1) ^ carry[i] ^ b);
  return out;
}

static void need_odd(const Modulus& ring) {
  if (ring.is_pow2()) throw ArgumentError("ring DReLU needs an odd modulus");
}

std::vector<u8> drelu_ring_simple(Session& s, const Modulus& ring, std::span<const u64> a) {
  need_odd(ring);
  u64 n = ring.max() + 1, h = (n - 1) / 2;
  unsigned eta = ring.bits();
  bool p0 = s.party() == 0;
  size_t N = a.size();
  std::vector<u64> x(N);
  for (size_t i = 0; i < N; ++i) x[i] = p0 ? n - 1 - a[i] : a[i];
  auto wrap = mill(s, eta, x);
  for (size_t i = 0; i < N; ++i) x[i] = p0 ? n - 1 - a[i] : h + a[i];
  auto lt = mill(s, eta + 1, x);
  for (size_t i = 0; i < N; ++i) x[i] = p0 ? n + h - a[i] : a[i];
  auto rt = mill(s, eta + 1, x);
  std::vector<u8> d(N);
  for (size_t i = 0; i < N; ++i) d[i] = lt[i] ^ rt[i];
  auto z = mux_bits(s, d, wrap);
  for (size_t i = 0; i < N; ++i) z[i] ^= lt[i] ^ static_cast<u8>(s.party());
  return z;
}

std::vector<u8> drelu_ring(Session& s, const Modulus& ring, std::span<const u64> a) {
  need_odd(ring);
  u64 n = ring.max() + 1, h = (n - 1) / 2;
  bool p0 = s.party() == 0;
  size_t N = a.size();
  std::vector<u64> x(p0 ? 2 * N : N);
  for (size_t i = 0; i < N; ++i) {
    if (p0) {
      x[2 * i] = 3 * h - a[i];
      x[2 * i + 1] = a[i] > h ? 2 * n - 1 - a[i] : n - 1 - a[i];
    } else {
      x[i] = h + a[i];
    }
  }
  auto c = mill_shared_receiver(s, ring.bits() + 1, 2, x);
  OtFlow f(s);
  std::vector<u8> z(N);
  size_t hd = 0;
  if (p0) {
    std::vector<u64> msgs(4 * N);
    for (size_t i = 0; i < N; ++i) {
      u8 wrap0 = c[2 * i], xt0 = c[2 * i + 1];
      z[i] = s.prg().bit();
      for (u32 j = 0; j < 4; ++j) {
        u8 j0 = j >> 1, j1 = j & 1;
        u8 t = 1 ^ xt0 ^ j0;
        u8 sp = a[i] > h ? (t & (wrap0 ^ j1)) : (t ^ ((1 ^ t) & (wrap0 ^ j1)));
        msgs[4 * i + j] = sp ^ z[i];
      }
    }
    f.send_kot(4, {1}, std::move(msgs));
  } else {
    std::vector<u32> ch(N);
    for (size_t i = 0; i < N; ++i) ch[i] = (c[2 * i + 1] << 1) | c[2 * i];
    hd = f.recv_kot(4, {1}, std::move(ch));
  }
  f.run();
  if (!p0)
    for (size_t i = 0; i < N; ++i) z[i] = f.out(hd)[i] & 1;
  return z;
}

std::vector<u8> drelu(Session& s, const Modulus& ring, std::span<const u64> a) {
  return ring.is_pow2() ? drelu_int(s, ring, a) : drelu_ring(s, ring, a);
}

}  // namespace s2pc
