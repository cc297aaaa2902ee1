#include "doctest.h"
#include "s2pc/gates.hpp"
#include "s2pc/sharing.hpp"
#include "support/harness.hpp"

using namespace s2pc;
using namespace s2pc::testing;

TEST_CASE("regular triples are valid and charged lambda+16 each") {
  auto r = run_both([](Session& s) { return gen_regular_triples(s, 10001); });
  REQUIRE(r.r0.size() == 10001);
  for (size_t i = 0; i < r.r0.size(); ++i) {
    u8 d = r.r0[i].d ^ r.r1[i].d, e = r.r0[i].e ^ r.r1[i].e, f = r.r0[i].f ^ r.r1[i].f;
    REQUIRE((d & e) == f);
  }
  CHECK(r.run.meter0.analytic_bits == 10001 * (128 + 16));

  auto two = run_both([](Session& s) { return gen_regular_triples(s, 2); });
  CHECK(two.run.meter0.analytic_bits == 2 * 128 + 32);
  auto none = run_both([](Session& s) { return gen_regular_triples(s, 0); });
  CHECK(none.run.meter0 == Meter{});
}

TEST_CASE("correlated triple pairs share e") {
  auto r = run_both([](Session& s) { return gen_correlated_triples(s, 10000); });
  for (size_t i = 0; i < r.r0.size(); ++i) {
    const auto &a = r.r0[i], &b = r.r1[i];
    u8 e = a.e ^ b.e;
    REQUIRE(((a.d ^ b.d) & e) == (a.f ^ b.f));
    REQUIRE(((a.d2 ^ b.d2) & e) == (a.f2 ^ b.f2));
  }
  auto one = run_both([](Session& s) { return gen_correlated_triples(s, 1); });
  CHECK(one.run.meter0.analytic_bits == 2 * 128 + 16);
}

TEST_CASE("AND gates reproduce the truth table") {
  Prg g(4);
  std::vector<u8> x0, x1, y0, y1, w0, w1, want, want2;
  for (int rep = 0; rep < 64; ++rep)
    for (int x = 0; x < 2; ++x)
      for (int w = 0; w < 2; ++w)
        for (int y = 0; y < 2; ++y) {
          u8 a = g.bit(), b = g.bit(), c = g.bit();
          x0.push_back(a), x1.push_back(a ^ x);
          w0.push_back(c), w1.push_back(c ^ w);
          y0.push_back(b), y1.push_back(b ^ y);
          want.push_back(x & y), want2.push_back(w & y);
        }
  size_t n = want.size();
  auto r = run_both([&](Session& s) {
    bool p0 = s.party() == 0;
    auto t = gen_regular_triples(s, n);
    s.ch().reset_meter();
    auto z = and_gates(s, p0 ? x0 : x1, p0 ? y0 : y1, t);
    return std::make_pair(z, s.ch().meter());
  });
  for (size_t i = 0; i < n; ++i) REQUIRE((r.r0.first[i] ^ r.r1.first[i]) == want[i]);
  CHECK(r.r0.second.analytic_bits == 4 * n);
  CHECK(r.r0.second.rounds == 1);

  auto rp = run_both([&](Session& s) {
    bool p0 = s.party() == 0;
    auto t = gen_correlated_triples(s, n);
    s.ch().reset_meter();
    auto z = and_pairs(s, p0 ? x0 : x1, p0 ? w0 : w1, p0 ? y0 : y1, t);
    return std::make_pair(z, s.ch().meter());
  });
  for (size_t i = 0; i < n; ++i) {
    REQUIRE((rp.r0.first[i] ^ rp.r1.first[i]) == want[i]);
    REQUIRE((rp.r0.first[n + i] ^ rp.r1.first[n + i]) == want2[i]);
  }
  CHECK(rp.r0.second.analytic_bits == 6 * n);
  CHECK(rp.r0.second.rounds == 1);
}

TEST_CASE("triple reuse is rejected") {
  CHECK_THROWS_AS(run_both([](Session& s) {
                    auto t = gen_regular_triples(s, 1);
                    std::vector<u8> x = {1};
                    and_gates(s, x, x, t);
                    and_gates(s, x, x, t);
                    return 0;
                  }),
                  ProtocolError);
}

TEST_CASE("mux examples and exhaustive Z_16") {
  auto z16 = Modulus::pow2(4);
  std::vector<u64> a0, a1, want;
  std::vector<u8> c0, c1;
  for (u64 a = 0; a < 16; ++a)
    for (u64 s0 = 0; s0 < 16; ++s0)
      for (int c = 0; c < 2; ++c)
        for (int cs = 0; cs < 2; ++cs) {
          a0.push_back(s0), a1.push_back(z16.sub(a, s0));
          c0.push_back(cs), c1.push_back(cs ^ c);
          want.push_back(c ? a : 0);
        }
  auto r = run_both([&](Session& s) {
    bool p0 = s.party() == 0;
    return mux(s, z16, p0 ? a0 : a1, p0 ? c0 : c1);
  });
  CHECK(reconstruct_vec(z16, r.r0, r.r1) == want);
  CHECK(r.run.meter0.analytic_bits == want.size() * 2 * (128 + 2 * 4));
  CHECK(r.run.meter0.rounds == 2);

  auto one = run_both([&](Session& s) {
    std::vector<u64> a = {s.party() == 0 ? 5u : 0u};
    std::vector<u8> c = {static_cast<u8>(s.party() == 0)};
    return mux(s, z16, a, c);
  });
  CHECK(z16.add(one.r0[0], one.r1[0]) == 5);
  CHECK(one.run.meter0.analytic_bits == 2 * (128 + 8));

  auto z7 = Modulus::odd(7);
  auto odd = run_both([&](Session& s) {
    std::vector<u64> a = {s.party() == 0 ? 3u : 4u, s.party() == 0 ? 6u : 0u};
    std::vector<u8> c = {1, static_cast<u8>(s.party())};
    return mux(s, z7, a, c);
  });
  CHECK(reconstruct_vec(z7, odd.r0, odd.r1) == std::vector<u64>{0, 6});
}

TEST_CASE("boolean mux over Z_2") {
  auto r = run_both([&](Session& s) {
    std::vector<u8> a = {1, 1, 0, 1};
    std::vector<u8> c = {0, 1, 1, static_cast<u8>(s.party())};
    if (s.party() == 1) a = {0, 0, 0, 0};
    return mux_bits(s, a, c);
  });
  CHECK(reconstruct_bits(r.r0, r.r1) == std::vector<u8>{0, 0, 0, 1});
  CHECK(r.run.meter0.analytic_bits == 4 * (2 * 128 + 4));
}

TEST_CASE("boolean to arithmetic") {
  auto z7 = Modulus::odd(7);
  auto r = run_both([&](Session& s) {
    std::vector<u8> c = {1, static_cast<u8>(s.party() == 0)};
    return b2a(s, z7, c);
  });
  CHECK(reconstruct_vec(z7, r.r0, r.r1) == std::vector<u64>{0, 1});
  CHECK(r.run.meter0.analytic_bits == 2 * (128 + 3));
  CHECK(r.run.meter0.rounds == 2);

  for (auto m : {Modulus::pow2(32), Modulus::odd(4294967291ULL), Modulus::pow2(2)}) {
    std::vector<u8> c0, c1, want;
    for (int rep = 0; rep < 1000; ++rep)
      for (int b = 0; b < 4; ++b) c0.push_back(b & 1), c1.push_back(b >> 1), want.push_back((b & 1) ^ (b >> 1));
    auto rr = run_both([&](Session& s) { return b2a(s, m, s.party() == 0 ? c0 : c1); });
    auto v = reconstruct_vec(m, rr.r0, rr.r1);
    for (size_t i = 0; i < want.size(); ++i) REQUIRE(v[i] == want[i]);
  }
}
