#pragma once

#include <utility>
#include <vector>

#include "s2pc/ring.hpp"

namespace s2pc {

struct BoolShare {
  u8 bit;
  int party;
};

struct ArithShare {
  RingValue value;
  int party;
};

std::pair<ArithShare, ArithShare> share(const RingValue& x, Prg& rng);
// Completes a sharing of x given party 0's share.
std::pair<ArithShare, ArithShare> share_with(const RingValue& x, const RingValue& share0);
std::pair<BoolShare, BoolShare> share_bit(bool x, Prg& rng);
std::pair<BoolShare, BoolShare> share_bit_with(bool x, bool share0);

RingValue reconstruct(const ArithShare& a, const ArithShare& b);
bool reconstruct(const BoolShare& a, const BoolShare& b);

ArithShare share_of_public(const RingValue& x, int party, int holder = 0);

// Vector forms used by the protocol layers.
std::pair<std::vector<u64>, std::vector<u64>> share_vec(const Modulus& m, std::span<const u64> x, Prg& rng);
std::vector<u64> reconstruct_vec(const Modulus& m, std::span<const u64> a, std::span<const u64> b);
std::vector<u8> reconstruct_bits(std::span<const u8> a, std::span<const u8> b);

}  // namespace s2pc
