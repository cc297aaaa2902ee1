#include "s2pc/gates.hpp"

#include "s2pc/bitpack.hpp"

namespace s2pc {

TripleGen::TripleGen(Session& s, OtFlow& flow, size_t regular, size_t pairs)
    : s_(s), flow_(flow), n_reg_(regular), n_pair_(pairs) {
  Prg& g = s.prg();
  size_t inst = (regular + 1) / 2;
  reg_.resize(2 * inst);
  pair_.resize(pairs);
  for (auto& t : reg_) t.d = g.bit(), t.e = g.bit(), t.f = s.party() == 0 ? g.bit() : 0;
  for (auto& t : pair_) {
    t.d = g.bit(), t.d2 = g.bit(), t.e = g.bit();
    if (s.party() == 0) t.f = g.bit(), t.f2 = g.bit();
  }
  if (inst) {
    std::optional<u64> charge = regular * (kLambda + 16);
    if (s.party() == 0) {
      std::vector<u64> msgs(inst * 16);
      for (size_t i = 0; i < inst; ++i) {
        const BitTriple& a = reg_[2 * i];
        const BitTriple& b = reg_[2 * i + 1];
        for (u32 j = 0; j < 16; ++j) {
          u8 d1 = j & 1, e1 = (j >> 1) & 1, d1b = (j >> 2) & 1, e1b = (j >> 3) & 1;
          u64 lo = a.f ^ ((a.d ^ d1) & (a.e ^ e1));
          u64 hi = b.f ^ ((b.d ^ d1b) & (b.e ^ e1b));
          msgs[i * 16 + j] = lo | (hi << 1);
        }
      }
      flow.send_kot(16, {2}, std::move(msgs), charge);
    } else {
      std::vector<u32> ch(inst);
      for (size_t i = 0; i < inst; ++i) {
        const BitTriple& a = reg_[2 * i];
        const BitTriple& b = reg_[2 * i + 1];
        ch[i] = a.d | (a.e << 1) | (b.d << 2) | (b.e << 3);
      }
      h_reg_ = flow.recv_kot(16, {2}, std::move(ch), charge);
    }
  }
  if (pairs) {
    if (s.party() == 0) {
      std::vector<u64> msgs(pairs * 8);
      for (size_t i = 0; i < pairs; ++i) {
        const TriplePair& t = pair_[i];
        for (u32 j = 0; j < 8; ++j) {
          u8 d1 = j & 1, d1b = (j >> 1) & 1, e1 = (j >> 2) & 1;
          u64 lo = t.f ^ ((t.d ^ d1) & (t.e ^ e1));
          u64 hi = t.f2 ^ ((t.d2 ^ d1b) & (t.e ^ e1));
          msgs[i * 8 + j] = lo | (hi << 1);
        }
      }
      flow.send_kot(8, {2}, std::move(msgs));
    } else {
      std::vector<u32> ch(pairs);
      for (size_t i = 0; i < pairs; ++i) ch[i] = pair_[i].d | (pair_[i].d2 << 1) | (pair_[i].e << 2);
      h_pair_ = flow.recv_kot(8, {2}, std::move(ch));
    }
  }
}

std::vector<BitTriple> TripleGen::regular() {
  if (s_.party() == 1 && !reg_.empty()) {
    const auto& o = flow_.out(h_reg_);
    for (size_t i = 0; i < o.size(); ++i) {
      reg_[2 * i].f = o[i] & 1;
      reg_[2 * i + 1].f = (o[i] >> 1) & 1;
    }
  }
  reg_.resize(n_reg_);
  return std::move(reg_);
}

std::vector<TriplePair> TripleGen::pairs() {
  if (s_.party() == 1 && !pair_.empty()) {
    const auto& o = flow_.out(h_pair_);
    for (size_t i = 0; i < o.size(); ++i) {
      pair_[i].f = o[i] & 1;
      pair_[i].f2 = (o[i] >> 1) & 1;
    }
  }
  return std::move(pair_);
}

std::vector<BitTriple> gen_regular_triples(Session& s, size_t count) {
  OtFlow f(s);
  TripleGen g(s, f, count, 0);
  f.run();
  return g.regular();
}

std::vector<TriplePair> gen_correlated_triples(Session& s, size_t pairs) {
  OtFlow f(s);
  TripleGen g(s, f, 0, pairs);
  f.run();
  return g.pairs();
}

size_t AndBatch::add(u8 x, u8 y, BitTriple& t) {
  if (t.used) throw ProtocolError("bit triple reused");
  t.used = true;
  ops_.push_back({false, static_cast<u8>(x & 1), 0, static_cast<u8>(y & 1), t.d, 0, t.e, t.f, 0});
  z_.push_back(0);
  opened_bits_ += 2;
  return z_.size() - 1;
}

size_t AndBatch::add_pair(u8 x, u8 x2, u8 y, TriplePair& t) {
  if (t.used) throw ProtocolError("bit triple reused");
  t.used = true;
  ops_.push_back({true, static_cast<u8>(x & 1), static_cast<u8>(x2 & 1), static_cast<u8>(y & 1), t.d, t.d2, t.e, t.f,
                  t.f2});
  z_.push_back(0);
  z_.push_back(0);
  opened_bits_ += 3;
  return z_.size() - 2;
}

void AndBatch::run(Session& s) {
  if (ops_.empty()) return;
  BitWriter bw;
  for (const Op& o : ops_) {
    bw.put(o.x ^ o.d, 1);
    if (o.pair) bw.put(o.x2 ^ o.d2, 1);
    bw.put(o.y ^ o.e, 1);
  }
  auto mine = bw.finish();
  auto theirs = s.ch().exchange(Tag::AndOpen, mine);
  BitReader a(mine), b(theirs);
  u8 me = s.party() == 1;
  size_t k = 0;
  for (const Op& o : ops_) {
    u8 u = (a.get(1) ^ b.get(1)) & 1;
    u8 u2 = o.pair ? (a.get(1) ^ b.get(1)) & 1 : 0;
    u8 v = (a.get(1) ^ b.get(1)) & 1;
    z_[k++] = o.f ^ (u & o.e) ^ (v & o.d) ^ (me & u & v);
    if (o.pair) z_[k++] = o.f2 ^ (u2 & o.e) ^ (v & o.d2) ^ (me & u2 & v);
  }
  s.ch().charge(2 * opened_bits_);
  ops_.clear();
}

std::vector<u8> and_gates(Session& s, std::span<const u8> x, std::span<const u8> y, std::span<BitTriple> t) {
  if (x.size() != y.size() || t.size() < x.size()) throw ArgumentError("AND input length mismatch");
  AndBatch b;
  for (size_t i = 0; i < x.size(); ++i) b.add(x[i], y[i], t[i]);
  b.run(s);
  std::vector<u8> z(x.size());
  for (size_t i = 0; i < z.size(); ++i) z[i] = b.result(i);
  return z;
}

std::vector<u8> and_pairs(Session& s, std::span<const u8> x, std::span<const u8> x2, std::span<const u8> y,
                          std::span<TriplePair> t) {
  if (x.size() != y.size() || x2.size() != y.size() || t.size() < x.size())
    throw ArgumentError("AND input length mismatch");
  AndBatch b;
  for (size_t i = 0; i < x.size(); ++i) b.add_pair(x[i], x2[i], y[i], t[i]);
  b.run(s);
  size_t n = x.size();
  std::vector<u8> z(2 * n);
  for (size_t i = 0; i < n; ++i) {
    z[i] = b.result(2 * i);
    z[n + i] = b.result(2 * i + 1);
  }
  return z;
}

namespace {

// Both directions of the multiplexer: each party sends (-r + (j ^ c_b) a_b)_j
// and receives with its own c_b.
std::vector<u64> mux_impl(Session& s, const Modulus& ring, std::span<const u64> a, std::span<const u8> c) {
  if (a.size() != c.size()) throw ArgumentError("mux length mismatch");
  size_t n = a.size();
  if (n == 0) return {};
  std::vector<u64> r(n), msgs(2 * n);
  std::vector<u32> ch(n);
  for (size_t i = 0; i < n; ++i) {
    r[i] = s.prg().uniform(ring);
    u64 ai = ring.reduce(a[i]);
    for (u32 j = 0; j < 2; ++j) msgs[2 * i + j] = ring.sub((j ^ (c[i] & 1)) ? ai : 0, r[i]);
    ch[i] = c[i] & 1;
  }
  OtFlow f(s);
  size_t h;
  if (s.party() == 0) {
    f.send_kot(2, {ring.bits()}, std::move(msgs));
    h = f.recv_kot(2, {ring.bits()}, std::move(ch));
  } else {
    h = f.recv_kot(2, {ring.bits()}, std::move(ch));
    f.send_kot(2, {ring.bits()}, std::move(msgs));
  }
  f.run();
  const auto& x = f.out(h);
  std::vector<u64> z(n);
  for (size_t i = 0; i < n; ++i) z[i] = ring.add(r[i], ring.reduce(x[i]));
  return z;
}

}  // namespace

std::vector<u64> mux(Session& s, const Modulus& ring, std::span<const u64> a, std::span<const u8> c) {
  return mux_impl(s, ring, a, c);
}

std::vector<u8> mux_bits(Session& s, std::span<const u8> a, std::span<const u8> c) {
  std::vector<u64> a64(a.begin(), a.end());
  auto z = mux_impl(s, Modulus::pow2(1), a64, c);
  return {z.begin(), z.end()};
}

std::vector<u64> b2a(Session& s, const Modulus& ring, std::span<const u8> c) {
  size_t n = c.size();
  if (n == 0) return {};
  OtFlow f(s);
  size_t h;
  if (s.party() == 0) {
    std::vector<u64> corr(c.begin(), c.end());
    for (auto& x : corr) x &= 1;
    h = f.send_cot(ring, 1, std::move(corr));
  } else {
    h = f.recv_cot(ring, 1, std::vector<u8>(c.begin(), c.end()));
  }
  f.run();
  const auto& y = f.out(h);
  std::vector<u64> d(n);
  for (size_t i = 0; i < n; ++i) {
    u64 two_y = ring.add(y[i], y[i]);
    d[i] = s.party() == 0 ? ring.add(c[i] & 1, two_y) : ring.sub(c[i] & 1, two_y);
  }
  return d;
}

}  // namespace s2pc
