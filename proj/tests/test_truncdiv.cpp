#include "doctest.h"
#include "s2pc/compare.hpp"
#include "s2pc/sharing.hpp"
#include "s2pc/truncdiv.hpp"
#include "support/harness.hpp"
#include "support/oracle.hpp"

using namespace s2pc;
using namespace s2pc::testing;

namespace {

struct Case {
  std::vector<u64> a0, a1, want;
};

// Every value of the ring under every split.
template <class F>
Case all_splits(const Modulus& m, F want) {
  Case c;
  u64 n = m.max() + 1;
  for (u64 a = 0; a < n; ++a)
    for (u64 s0 = 0; s0 < n; ++s0) {
      c.a0.push_back(s0);
      c.a1.push_back(m.sub(a, s0));
      c.want.push_back(want(a));
    }
  return c;
}

template <class F>
std::pair<std::vector<u64>, Meter> run_op(const Modulus& m, const Case& c, F f, unsigned mill_m = 4) {
  auto r = run_both([&](Session& s) { return f(s, s.party() == 0 ? c.a0 : c.a1); }, params_m(mill_m));
  return {reconstruct_vec(m, r.r0, r.r1), r.run.meter0};
}

Meter cost(const Modulus& m, unsigned mill_m, const std::function<std::vector<u64>(Session&, std::vector<u64>)>& f) {
  Case c{{1}, {2}, {}};
  return run_op(m, c, f, mill_m).second;
}

}  // namespace

TEST_CASE("division identity examples") {
  auto z8 = Modulus::pow2(3);
  auto t = decompose_division(z8, 2, 3, 2);
  CHECK(t.corr == -1);
  CHECK(t.quotient == 6);
  CHECK(z8.to_signed(t.quotient) == -2);

  auto z16 = Modulus::pow2(4);
  CHECK(truncation_identity(4, 3, 15, 1) == 1);
  CHECK(decompose_division(z16, 3, 15, 2).corr == 0);

  for (u64 a = 0; a < 16; ++a) CHECK(decompose_division(z16, a, 0, 1).quotient == a);
  CHECK_THROWS_AS(decompose_division(z16, 1, 1, 0), ArgumentError);
  CHECK_THROWS_AS(decompose_division(z16, 1, 1, 16), ArgumentError);
  CHECK_THROWS_AS(truncation_identity(4, 1, 1, 4), ArgumentError);
}

TEST_CASE("division identity holds on small rings") {
  std::vector<Modulus> rings;
  for (u64 n = 3; n <= 63; n += 2) rings.push_back(Modulus::odd(n));
  for (unsigned l = 2; l <= 6; ++l) rings.push_back(Modulus::pow2(l));
  for (auto& m : rings) {
    u64 n = m.max() + 1;
    for (u64 d = 1; d < n; ++d)
      for (u64 a0 = 0; a0 < n; ++a0)
        for (u64 a1 = 0; a1 < n; ++a1) {
          auto t = decompose_division(m, a0, a1, d);
          u64 a = m.add(a0, a1);
          REQUIRE(t.quotient == oracle::ring_div(a, d, n));
          REQUIRE(t.corr >= -1);
          REQUIRE(t.corr <= 1);
          REQUIRE(t.A >= -2 * static_cast<i128>(d) + 2);
          REQUIRE(t.A <= 2 * static_cast<i128>(d) - 2);
          REQUIRE(t.n1 * d + t.n0 == n);
        }
  }
}

TEST_CASE("truncation identity, exhaustive up to 10 bits") {
  for (unsigned l = 2; l <= 10; ++l) {
    u64 n = u64{1} << l;
    for (unsigned s = 0; s < l; ++s)
      for (u64 a0 = 0; a0 < n; ++a0)
        for (u64 a1 = 0; a1 < n; ++a1)
          REQUIRE(truncation_identity(l, a0, a1, s) == oracle::ring_div((a0 + a1) % n, u64{1} << s, n));
  }
}

TEST_CASE("secure truncation") {
  auto z4 = Modulus::pow2(4);
  auto six = run_op(z4, Case{{2}, {4}, {}}, [&](Session& s, std::vector<u64> a) { return truncate(s, z4, a, 1); });
  CHECK(six.first[0] == 3);

  auto z8 = Modulus::pow2(8);
  for (unsigned sh = 1; sh < 8; ++sh) {
    auto c = all_splits(z8, [&](u64 a) { return oracle::ring_div(a, u64{1} << sh, 256); });
    auto r = run_op(z8, c, [&](Session& s, std::vector<u64> a) { return truncate(s, z8, a, sh); });
    REQUIRE(r.first == c.want);
  }
  auto id = run_op(z8, Case{{200}, {100}, {}}, [&](Session& s, std::vector<u64> a) { return truncate(s, z8, a, 0); });
  CHECK(id.first[0] == 44);
  CHECK(id.second == Meter{});
  CHECK_THROWS_AS(run_op(z8, Case{{1}, {1}, {}}, [&](Session& s, std::vector<u64> a) { return truncate(s, z8, a, 8); }),
                  ArgumentError);
}

TEST_CASE("truncation cost and the nonnegative shortcut") {
  auto z32 = Modulus::pow2(32);
  auto full = cost(z32, 7, [&](Session& s, std::vector<u64> a) { return truncate(s, z32, a, 12); });
  CHECK(full.analytic_bits == 4310);

  auto z8 = Modulus::pow2(8);
  Case c;
  for (u64 a = 0; a < 128; ++a)
    for (u64 s0 = 0; s0 < 256; s0 += 3) c.a0.push_back(s0), c.a1.push_back(z8.sub(a, s0)), c.want.push_back(a >> 3);
  auto nn = run_op(z8, c, [&](Session& s, std::vector<u64> a) { return truncate(s, z8, a, 3, true); });
  auto gen = run_op(z8, c, [&](Session& s, std::vector<u64> a) { return truncate(s, z8, a, 3, false); });
  CHECK(nn.first == c.want);
  CHECK(gen.first == c.want);
  CHECK(nn.second.analytic_bits < gen.second.analytic_bits);
}

TEST_CASE("ring division examples and costs") {
  auto z7 = Modulus::odd(7);
  auto r = run_op(z7, Case{{2}, {3}, {}}, [&](Session& s, std::vector<u64> a) { return div_ring(s, z7, a, 3); });
  CHECK(r.first[0] == 6);

  auto z32 = Modulus::pow2(32);
  CHECK(cost(z32, 8, [&](Session& s, std::vector<u64> a) { return div_ring(s, z32, a, 49); }).analytic_bits == 5570);

  // Odd 32-bit modulus: the meter equals the sum of its parts.
  auto zn = Modulus::odd(4294967291ULL);
  u64 parts = cost(zn, 7, [&](Session& s, std::vector<u64> a) {
                auto b = drelu_ring(s, zn, a);
                return std::vector<u64>(b.begin(), b.end());
              }).analytic_bits;
  unsigned delta = 9;
  auto zd = Modulus::pow2(delta);
  parts += kot_cost(4, 32 + delta);
  parts += 3 * cost(zd, 7, [&](Session& s, std::vector<u64> a) {
                 auto b = drelu_int(s, zd, a);
                 return std::vector<u64>(b.begin(), b.end());
               }).analytic_bits;
  parts += 3 * cot_cost(32);
  u64 whole = cost(zn, 7, [&](Session& s, std::vector<u64> a) { return div_ring(s, zn, a, 49); }).analytic_bits;
  CHECK(whole == parts);
  CHECK(whole == 7796);

  CHECK(cost(z7, 4, [&](Session& s, std::vector<u64> a) { return div_ring(s, z7, a, 1); }) == Meter{});
  CHECK_THROWS_AS(run_op(z7, Case{{1}, {1}, {}}, [&](Session& s, std::vector<u64> a) { return div_ring(s, z7, a, 7); }),
                  ArgumentError);
  CHECK_THROWS_AS(run_op(z7, Case{{1}, {1}, {}}, [&](Session& s, std::vector<u64> a) { return div_ring(s, z7, a, 0); }),
                  ArgumentError);
}

TEST_CASE("ring division, exhaustive small rings") {
  std::vector<Modulus> rings;
  for (u64 n = 7; n <= 63; n += 2) rings.push_back(Modulus::odd(n));
  for (unsigned l = 2; l <= 8; ++l) rings.push_back(Modulus::pow2(l));
  for (auto& m : rings) {
    u64 n = m.max() + 1;
    for (u64 d : {u64{2}, u64{3}, u64{5}, u64{7}, 49 % n}) {
      if (d == 0 || d >= n) continue;
      auto c = all_splits(m, [&](u64 a) { return oracle::ring_div(a, d, n); });
      auto r = run_op(m, c, [&](Session& s, std::vector<u64> a) { return div_ring(s, m, a, d); });
      INFO("n=" << n << " d=" << d);
      REQUIRE(r.first == c.want);
    }
  }
}

TEST_CASE("truncation in rings with n mod 2^s small") {
  auto q = Modulus::odd(12289);
  CHECK(q.value() % 16 == 1);
  auto z97 = Modulus::odd(97);
  for (unsigned sh = 1; sh <= 5; ++sh) {
    auto c = all_splits(z97, [&](u64 a) { return oracle::ring_div(a, u64{1} << sh, 97); });
    auto r = run_op(z97, c, [&](Session& s, std::vector<u64> a) { return truncate_special_ring(s, z97, a, sh); });
    REQUIRE(r.first == c.want);
  }
  for (unsigned sh : {4u, 12u}) {
    u64 special = cost(q, 7, [&](Session& s, std::vector<u64> a) { return truncate_special_ring(s, q, a, sh); }).analytic_bits;
    u64 general = cost(q, 7, [&](Session& s, std::vector<u64> a) { return div_ring(s, q, a, u64{1} << sh); }).analytic_bits;
    CHECK(special < general);
  }
  auto z15 = Modulus::odd(15);
  CHECK_THROWS_AS(
      run_op(z15, Case{{1}, {1}, {}}, [&](Session& s, std::vector<u64> a) { return truncate_special_ring(s, z15, a, 2); }),
      ArgumentError);
}
