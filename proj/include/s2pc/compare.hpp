#pragma once

#include <span>
#include <vector>

#include "s2pc/gates.hpp"

namespace s2pc {

// Leaf split of an l-bit comparison: q blocks of m bits, the most significant
// block holding the remaining r bits.
struct MillParams {
  unsigned bits, m, q, r;
  static MillParams make(unsigned bits, unsigned m);
  unsigned leaf_bits(unsigned j) const { return j + 1 == q ? r : m; }
};

// Comparison tree: leaves 0..q-1 (0 least significant), then internal nodes.
struct CompareTree {
  struct Node {
    int lo = -1, hi = -1;  // children; -1 for leaves
    int level = 0;
    bool leftmost = false;  // on the path to leaf 0, so eq is never needed
  };
  std::vector<Node> nodes;
  int root = 0;
  int depth = 0;
  unsigned regular_ands = 0;
  unsigned paired_ands = 0;
  static CompareTree make(unsigned q);
};

// Boolean shares of 1{x < y}; party 0 passes x, party 1 passes y. m = 0 uses
// the session default.
std::vector<u8> mill(Session& s, unsigned bits, std::span<const u64> inputs, unsigned m = 0);

// t comparisons per instance against one party-1 value. Party 0 passes t values
// per instance laid out [instance][t]; outputs use the same layout.
std::vector<u8> mill_shared_receiver(Session& s, unsigned bits, unsigned t, std::span<const u64> inputs,
                                     unsigned m = 0);

// Boolean shares of 1{signed(a) >= 0}.
std::vector<u8> drelu_int(Session& s, const Modulus& ring, std::span<const u64> a);
std::vector<u8> drelu_ring_simple(Session& s, const Modulus& ring, std::span<const u64> a);
std::vector<u8> drelu_ring(Session& s, const Modulus& ring, std::span<const u64> a);
std::vector<u8> drelu(Session& s, const Modulus& ring, std::span<const u64> a);

}  // namespace s2pc
