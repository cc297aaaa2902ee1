#include "s2pc/session.hpp"

#include <cstring>
#include <exception>
#include <thread>

namespace s2pc {

namespace {

constexpr u32 kMagic = 0x43503253;  // "S2PC"
constexpr u32 kVersion = 1;

u64 splitmix(u64 x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

Session::Session(Channel& ch, const SessionParams& p, u64 dealer_seed)
    : ch_(ch), params_(p), prg_(splitmix(p.seed ^ (0x51ed270b27u * (ch.party() + 1)))),
      dealer_(dealer_seed, p.dealer_budget) {
  set_mill_m(p.mill_m);
}

void Session::set_mill_m(unsigned m) {
  if (m < 1 || m > 8) throw ArgumentError("mill parameter m must be in 1..8");
  params_.mill_m = m;
}

Session handshake(Channel& ch, const SessionParams& p) {
  u64 dealer_seed = ch.party() == 0 ? splitmix(p.seed ^ 0xdea1e5eedULL) : 0;
  u32 hello[7] = {kMagic, kVersion, p.bitwidth, p.scale, p.mill_m, static_cast<u32>(dealer_seed),
                  static_cast<u32>(dealer_seed >> 32)};
  std::vector<u8> out(sizeof hello);
  std::memcpy(out.data(), hello, sizeof hello);
  auto in = ch.exchange(Tag::Handshake, out);
  u32 peer[7];
  std::memcpy(peer, in.data(), sizeof peer);
  if (peer[0] != kMagic || peer[1] != kVersion) throw SetupError("handshake: peer speaks a different protocol");
  const char* names[] = {"bitwidth", "scale", "m"};
  for (int i = 0; i < 3; ++i)
    if (peer[2 + i] != hello[2 + i])
      throw SetupError(std::string("handshake: ") + names[i] + " mismatch (local " + std::to_string(hello[2 + i]) +
                       ", peer " + std::to_string(peer[2 + i]) + ")");
  if (ch.party() == 1) dealer_seed = peer[5] | (static_cast<u64>(peer[6]) << 32);
  return Session(ch, p, dealer_seed);
}

PairResult run_pair(const SessionParams& p, const std::function<void(Session&)>& party0,
                    const std::function<void(Session&)>& party1, Backend backend) {
  std::unique_ptr<Transport> t0, t1;
  std::unique_ptr<TcpListener> listener;
  if (backend == Backend::Memory) {
    std::tie(t0, t1) = make_memory_pair();
  } else {
    listener = std::make_unique<TcpListener>(0, "127.0.0.1");
  }
  PairResult res;
  std::exception_ptr err[2];
  auto body = [&](int party, std::unique_ptr<Transport> t, const std::function<void(Session&)>& f) {
    std::unique_ptr<Channel> ch;
    try {
      if (!t) t = party == 0 ? listener->accept() : tcp_connect("127.0.0.1", listener->port());
      ch = std::make_unique<Channel>(party, std::move(t));
      Session s = handshake(*ch, p);
      ch->reset_meter();
      f(s);
      (party == 0 ? res.meter0 : res.meter1) = ch->meter();
      (party == 0 ? res.digest0 : res.digest1) = ch->transcript_digest();
    } catch (...) {
      err[party] = std::current_exception();
      if (ch) ch->close();
    }
  };
  std::thread th(body, 1, std::move(t1), std::cref(party1));
  body(0, std::move(t0), party0);
  th.join();
  // Prefer the root cause over the peer's resulting disconnect.
  for (int pass = 0; pass < 2; ++pass)
    for (auto& e : err) {
      if (!e) continue;
      if (pass == 1) std::rethrow_exception(e);
      try {
        std::rethrow_exception(e);
      } catch (const TransportError&) {
      } catch (...) {
        throw;
      }
    }
  return res;
}

}  // namespace s2pc
