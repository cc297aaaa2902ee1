#include <string>
#include <thread>

#include "doctest.h"
#include "s2pc/ot.hpp"
#include "support/harness.hpp"

using namespace s2pc;
using namespace s2pc::testing;

namespace {

std::vector<u8> bytes(const std::string& s) { return {s.begin(), s.end()}; }

struct Pair {
  std::unique_ptr<Channel> a, b;
};

Pair memory_pair() {
  auto [t0, t1] = make_memory_pair();
  return {std::make_unique<Channel>(0, std::move(t0)), std::make_unique<Channel>(1, std::move(t1))};
}

Pair tcp_pair() {
  TcpListener l(0, "127.0.0.1");
  std::unique_ptr<Transport> client;
  std::thread th([&] { client = tcp_connect("127.0.0.1", l.port()); });
  auto server = l.accept();
  th.join();
  return {std::make_unique<Channel>(0, std::move(server)), std::make_unique<Channel>(1, std::move(client))};
}

void fifo_checks(Pair p) {
  p.a->send(Tag::User, {});
  CHECK(p.b->recv(Tag::User).empty());
  p.a->send(Tag::User, bytes("abc"));
  CHECK(p.b->recv(Tag::User) == bytes("abc"));
  p.a->send(Tag::User, bytes("first"));
  p.a->send(Tag::User, bytes("second"));
  CHECK(p.b->recv(Tag::User) == bytes("first"));
  CHECK(p.b->recv(Tag::User, 6) == bytes("second"));
  std::vector<u8> big(1 << 20, 7);
  p.b->send(Tag::User, big);
  CHECK(p.a->recv(Tag::User) == big);
}

}  // namespace

TEST_CASE("fifo delivery over memory and tcp") {
  fifo_checks(memory_pair());
  fifo_checks(tcp_pair());
}

TEST_CASE("tag mismatch and disconnect") {
  auto p = memory_pair();
  p.a->send(Tag::OtPayload, bytes("x"));
  CHECK_THROWS_AS(p.b->recv(Tag::OtCorrection), ProtocolError);
  p.a->close();
  CHECK_THROWS_AS(p.b->recv(Tag::User), TransportError);

  auto q = tcp_pair();
  q.a.reset();
  CHECK_THROWS_AS(q.b->recv(Tag::User), TransportError);
}

TEST_CASE("length check") {
  auto p = memory_pair();
  p.a->send(Tag::User, bytes("abcd"));
  CHECK_THROWS_AS(p.b->recv(Tag::User, 3), ProtocolError);
}

TEST_CASE("round clock") {
  auto p = memory_pair();
  CHECK(p.a->meter() == Meter{});
  // request then dependent reply
  p.a->send(Tag::User, bytes("q"));
  p.b->recv(Tag::User);
  p.b->send(Tag::User, bytes("r"));
  p.a->recv(Tag::User);
  CHECK(p.a->meter().rounds == 2);
  CHECK(p.b->meter().rounds == 2);
  // simultaneous exchange adds one round
  p.a->send(Tag::User, bytes("x"));
  p.b->send(Tag::User, bytes("y"));
  p.a->recv(Tag::User);
  p.b->recv(Tag::User);
  CHECK(p.a->meter().rounds == 3);
  CHECK(p.b->meter().rounds == 3);
  CHECK(p.a->meter().bits_sent == 2 * 8 * (kFrameHeader + 1));
  p.a->reset_meter();
  CHECK(p.a->meter() == Meter{});
}

TEST_CASE("analytic charge of a single 1-of-2 OT on 32-bit strings") {
  auto r = run_both([](Session& s) {
    if (s.party() == 0)
      ot_send(s, 2, 32, {1, 2});
    else
      ot_recv(s, 2, 32, {1});
    return s.ch().meter();
  });
  CHECK(r.r0.analytic_bits == 192);
  CHECK(r.r1.analytic_bits == 192);
  CHECK(r.r0.rounds == 2);
}

TEST_CASE("handshake") {
  SessionParams a, b;
  b.mill_m = 7;
  auto [t0, t1] = make_memory_pair();
  Channel c0(0, std::move(t0)), c1(1, std::move(t1));
  std::thread th([&] { CHECK_THROWS_AS(handshake(c1, b), SetupError); });
  CHECK_THROWS_AS(handshake(c0, a), SetupError);
  th.join();

  auto r = run_both([](Session& s) { return s.dealer().next(); });
  CHECK(r.r0 == r.r1);
}

TEST_CASE("memory and tcp transcripts match") {
  auto body = [](Session& s) {
    std::vector<u8> msg(100, static_cast<u8>(s.party()));
    s.ch().exchange(Tag::User, msg);
    if (s.party() == 0)
      ot_send(s, 4, 8, {1, 2, 3, 4});
    else
      ot_recv(s, 4, 8, {2});
    return 0;
  };
  auto m = run_both(body, {}, Backend::Memory);
  auto t = run_both(body, {}, Backend::Tcp);
  CHECK(m.run.meter0 == t.run.meter0);
  CHECK(m.run.meter1 == t.run.meter1);
  CHECK(m.run.digest0 == t.run.digest0);
  CHECK(m.run.digest1 == t.run.digest1);
}

TEST_CASE("failure in one party surfaces as its own error") {
  CHECK_THROWS_AS(run_pair(
                      {}, [](Session&) { throw ArgumentError("boom"); },
                      [](Session& s) { s.ch().recv(Tag::User); }),
                  ArgumentError);
}
