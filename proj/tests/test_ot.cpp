#include "doctest.h"
#include "s2pc/ot.hpp"
#include "support/harness.hpp"

using namespace s2pc;
using namespace s2pc::testing;

TEST_CASE("1-of-k OT examples") {
  auto r = run_both([](Session& s) {
    if (s.party() == 0) {
      ot_send(s, 2, 4, {0x0, 0xF});
      return std::vector<u64>{};
    }
    return ot_recv(s, 2, 4, {1});
  });
  CHECK(r.r1 == std::vector<u64>{0xF});

  auto r4 = run_both([](Session& s) {
    if (s.party() == 0) {
      ot_send(s, 4, 8, {0xa, 0xb, 0xc, 0xd});
      return std::vector<u64>{};
    }
    return ot_recv(s, 4, 8, {2});
  });
  CHECK(r4.r1 == std::vector<u64>{0xc});
  CHECK(r4.run.meter0.analytic_bits == 2 * 128 + 4 * 8);
  CHECK(r4.run.meter1.analytic_bits == 2 * 128 + 4 * 8);
}

TEST_CASE("exhaustive k=8, l=8 over all choices") {
  Prg g(5);
  std::vector<u64> msgs;
  std::vector<u32> choice;
  for (int rep = 0; rep < 50; ++rep)
    for (u32 c = 0; c < 8; ++c) {
      for (int j = 0; j < 8; ++j) msgs.push_back(g.bits(8));
      choice.push_back(c);
    }
  auto r = run_both([&](Session& s) {
    if (s.party() == 0) {
      ot_send(s, 8, 8, msgs);
      return std::vector<u64>{};
    }
    return ot_recv(s, 8, 8, choice);
  });
  for (size_t i = 0; i < choice.size(); ++i) REQUIRE(r.r1[i] == msgs[i * 8 + choice[i]]);
}

TEST_CASE("derandomization over a parameter grid") {
  Prg g(9);
  for (u32 k : {2u, 3u, 4u, 5u, 16u, 100u, 256u})
    for (unsigned bits : {1u, 7u, 33u, 64u}) {
      std::vector<u64> msgs;
      std::vector<u32> choice;
      for (u32 c = 0; c < k; c += (k > 16 ? 7 : 1)) {
        for (u32 j = 0; j < k; ++j) msgs.push_back(g.bits(bits));
        choice.push_back(c);
      }
      auto r = run_both([&](Session& s) {
        if (s.party() == 0) {
          ot_send(s, k, bits, msgs);
          return std::vector<u64>{};
        }
        return ot_recv(s, k, bits, choice);
      });
      for (size_t i = 0; i < choice.size(); ++i) REQUIRE(r.r1[i] == msgs[i * k + choice[i]]);
      CHECK(r.run.meter0.analytic_bits == choice.size() * kot_cost(k, bits));
    }
}

TEST_CASE("multi-lane messages") {
  std::vector<u64> msgs = {1, 100, 2, 200, 3, 300, 0, 0xffff};
  auto r = run_both([&](Session& s) {
    OtFlow f(s);
    size_t h = 0;
    if (s.party() == 0)
      f.send_kot(4, {3, 16}, msgs);
    else
      h = f.recv_kot(4, {3, 16}, {3});
    f.run();
    return s.party() ? f.out(h) : std::vector<u64>{};
  });
  CHECK(r.r1 == std::vector<u64>{0, 0xffff});
}

TEST_CASE("correlated OT") {
  auto z16 = Modulus::pow2(4);
  auto r = run_both([&](Session& s) {
    if (s.party() == 0) return cot_send(s, z16, {5, 5});
    return cot_recv(s, z16, {0, 1});
  });
  CHECK(r.r1[0] == r.r0[0]);
  CHECK(z16.sub(r.r1[1], r.r0[1]) == 5);
  CHECK(r.run.meter0.analytic_bits == 2 * (128 + 4));

  for (auto m : {Modulus::pow2(32), Modulus::pow2(64), Modulus::odd(4294967291ULL), Modulus::odd(7)}) {
    Prg g(1);
    std::vector<u64> x(1000);
    std::vector<u8> b(1000);
    for (size_t i = 0; i < x.size(); ++i) x[i] = g.uniform(m), b[i] = g.bit();
    auto rr = run_both([&](Session& s) { return s.party() == 0 ? cot_send(s, m, x) : cot_recv(s, m, b); });
    for (size_t i = 0; i < x.size(); ++i) REQUIRE(m.sub(rr.r1[i], rr.r0[i]) == (b[i] ? x[i] : 0));
  }
}

TEST_CASE("vector COT lanes") {
  auto m = Modulus::pow2(20);
  auto r = run_both([&](Session& s) {
    OtFlow f(s);
    size_t h = s.party() == 0 ? f.send_cot(m, 3, {7, 8, 9, 10, 11, 12}) : f.recv_cot(m, 3, {1, 0});
    f.run();
    return f.out(h);
  });
  std::vector<u64> want = {7, 8, 9, 0, 0, 0};
  for (size_t i = 0; i < 6; ++i) CHECK(m.sub(r.r1[i], r.r0[i]) == want[i]);
  CHECK(r.run.meter0.analytic_bits == 2 * (128 + 60));
}

TEST_CASE("batches") {
  auto empty = run_both([](Session& s) {
    OtFlow f(s);
    f.run();
    return 0;
  });
  CHECK(empty.run.meter0 == Meter{});

  auto three = run_both([](Session& s) {
    OtFlow f(s);
    size_t h = 0;
    if (s.party() == 0)
      f.send_kot(2, {4}, {1, 2, 3, 4, 5, 6});
    else
      h = f.recv_kot(2, {4}, {0, 1, 0});
    f.run();
    return s.party() ? f.out(h) : std::vector<u64>{};
  });
  CHECK(three.r1 == std::vector<u64>{1, 4, 5});
  CHECK(three.run.meter0.analytic_bits == 3 * (128 + 8));
  CHECK(three.run.meter0.rounds == 2);

  auto mixed = run_both([](Session& s) {
    OtFlow f(s);
    size_t h1 = 0, h2 = 0, h3 = 0;
    auto z = Modulus::odd(101);
    if (s.party() == 0) {
      f.send_kot(2, {4}, {1, 2});
      f.send_kot(16, {1}, std::vector<u64>(16, 1));
      h3 = f.send_cot(z, 1, {50});
    } else {
      h1 = f.recv_kot(2, {4}, {1});
      h2 = f.recv_kot(16, {1}, {9});
      h3 = f.recv_cot(z, 1, {1});
    }
    f.run();
    return std::vector<u64>{s.party() ? f.out(h1)[0] : 0, s.party() ? f.out(h2)[0] : 0, f.out(h3)[0]};
  });
  CHECK(mixed.r1[0] == 2);
  CHECK(mixed.r1[1] == 1);
  CHECK(Modulus::odd(101).sub(mixed.r1[2], mixed.r0[2]) == 50);
  CHECK(mixed.run.meter1.analytic_bits == (128 + 8) + (256 + 16) + (128 + 7));
  CHECK(mixed.run.meter1.rounds == 2);
}

TEST_CASE("errors") {
  auto r = [](auto f) { return run_both(f); };
  CHECK_THROWS_AS(r([](Session& s) {
                    OtFlow f(s);
                    f.send_kot(4, {8}, {1, 2, 3});
                    return 0;
                  }),
                  ArgumentError);
  CHECK_THROWS_AS(r([](Session& s) {
                    OtFlow f(s);
                    f.recv_kot(4, {8}, {4});
                    return 0;
                  }),
                  ArgumentError);
  // mismatched batch layouts are detected
  CHECK_THROWS_AS(r([](Session& s) {
                    if (s.party() == 0)
                      ot_send(s, 2, 8, {1, 2, 3, 4});
                    else
                      ot_recv(s, 2, 8, {1});
                    return 0;
                  }),
                  ProtocolError);
  SessionParams p;
  p.dealer_budget = 2;
  CHECK_THROWS_AS(run_both(
                      [](Session& s) {
                        if (s.party() == 0)
                          ot_send(s, 2, 8, {1, 2, 3, 4, 5, 6});
                        else
                          ot_recv(s, 2, 8, {1, 0, 1});
                        return 0;
                      },
                      p),
                  SetupError);
}
