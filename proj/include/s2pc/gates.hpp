#pragma once

#include <span>
#include <vector>

#include "s2pc/ot.hpp"

namespace s2pc {

// One party's shares of a bit triple with d & e = f.
struct BitTriple {
  u8 d = 0, e = 0, f = 0;
  bool used = false;
};

// Two triples (d, e, f) and (d2, e, f2) sharing e.
struct TriplePair {
  u8 d = 0, d2 = 0, e = 0, f = 0, f2 = 0;
  bool used = false;
};

// Queues triple generation into a flow; triples are ready after flow.run().
// Regular triples come two per 1-of-16 OT, pairs one per 1-of-8 OT.
class TripleGen {
 public:
  TripleGen(Session& s, OtFlow& flow, size_t regular, size_t pairs);
  std::vector<BitTriple> regular();
  std::vector<TriplePair> pairs();

 private:
  Session& s_;
  OtFlow& flow_;
  size_t n_reg_, n_pair_;
  size_t h_reg_ = 0, h_pair_ = 0;
  std::vector<BitTriple> reg_;
  std::vector<TriplePair> pair_;
};

std::vector<BitTriple> gen_regular_triples(Session& s, size_t count);
std::vector<TriplePair> gen_correlated_triples(Session& s, size_t pairs);

// Beaver ANDs opened together in one simultaneous exchange.
class AndBatch {
 public:
  size_t add(u8 x, u8 y, BitTriple& t);
  // Returns the index of x & y; x2 & y follows at the next index.
  size_t add_pair(u8 x, u8 x2, u8 y, TriplePair& t);
  void run(Session& s);
  u8 result(size_t i) const { return z_[i]; }
  size_t size() const { return z_.size(); }

 private:
  struct Op {
    bool pair;
    u8 x, x2, y;
    u8 d, d2, e, f, f2;
  };
  std::vector<Op> ops_;
  std::vector<u8> z_;
  size_t opened_bits_ = 0;
};

std::vector<u8> and_gates(Session& s, std::span<const u8> x, std::span<const u8> y, std::span<BitTriple> t);
// Returns x[i] & y[i] followed by x2[i] & y[i].
std::vector<u8> and_pairs(Session& s, std::span<const u8> x, std::span<const u8> x2, std::span<const u8> y,
                          std::span<TriplePair> t);

// Shares of c * a for arithmetic a and boolean c.
std::vector<u64> mux(Session& s, const Modulus& ring, std::span<const u64> a, std::span<const u8> c);
// Same over Z_2.
std::vector<u8> mux_bits(Session& s, std::span<const u8> a, std::span<const u8> c);
// Arithmetic shares of a boolean-shared bit.
std::vector<u64> b2a(Session& s, const Modulus& ring, std::span<const u8> c);

}  // namespace s2pc
