#pragma once

#include <functional>
#include <limits>

#include "s2pc/transport.hpp"

namespace s2pc {

// Simulated trusted dealer: both parties expand the same seed and consume
// records in the same order, each keeping only its own half of a record.
class Dealer {
 public:
  explicit Dealer(u64 seed, u64 budget = std::numeric_limits<u64>::max()) : prg_(seed), budget_(budget) {}
  void take_record() {
    if (used_ == budget_) throw SetupError("dealer pool exhausted");
    ++used_;
  }
  u64 next() { return prg_.next(); }
  u64 below(u64 k) { return prg_.below(k); }
  u64 uniform(const Modulus& m) { return prg_.uniform(m); }
  u64 used() const { return used_; }

 private:
  Prg prg_;
  u64 budget_;
  u64 used_ = 0;
};

struct SessionParams {
  unsigned bitwidth = 32;
  unsigned scale = 0;
  unsigned mill_m = 4;
  u64 seed = 1;
  u64 dealer_budget = std::numeric_limits<u64>::max();
};

class Session {
 public:
  Session(Channel& ch, const SessionParams& p, u64 dealer_seed);

  int party() const { return ch_.party(); }
  Channel& ch() { return ch_; }
  Prg& prg() { return prg_; }
  Dealer& dealer() { return dealer_; }
  const SessionParams& params() const { return params_; }
  unsigned mill_m() const { return params_.mill_m; }
  void set_mill_m(unsigned m);

 private:
  Channel& ch_;
  SessionParams params_;
  Prg prg_;
  Dealer dealer_;
};

// Exchanges (bitwidth, scale, m) and the dealer seed chosen by party 0.
Session handshake(Channel& ch, const SessionParams& p);

enum class Backend { Memory, Tcp };

struct PairResult {
  Meter meter0, meter1;
  u64 digest0 = 0, digest1 = 0;
};

// Runs both parties on two threads over a fresh channel pair. The meters are
// reset after the handshake so they cover only the supplied bodies.
PairResult run_pair(const SessionParams& p, const std::function<void(Session&)>& party0,
                    const std::function<void(Session&)>& party1, Backend backend = Backend::Memory);

}  // namespace s2pc
