#include "s2pc/sharing.hpp"

namespace s2pc {

std::pair<ArithShare, ArithShare> share(const RingValue& x, Prg& rng) {
  return share_with(x, RingValue(rng.uniform(x.mod), x.mod));
}

std::pair<ArithShare, ArithShare> share_with(const RingValue& x, const RingValue& share0) {
  if (!(x.mod == share0.mod)) throw ArgumentError("modulus mismatch");
  return {ArithShare{share0, 0}, ArithShare{sub(x, share0), 1}};
}

std::pair<BoolShare, BoolShare> share_bit(bool x, Prg& rng) { return share_bit_with(x, rng.bit()); }

std::pair<BoolShare, BoolShare> share_bit_with(bool x, bool share0) {
  return {BoolShare{static_cast<u8>(share0), 0}, BoolShare{static_cast<u8>(share0 ^ x), 1}};
}

RingValue reconstruct(const ArithShare& a, const ArithShare& b) {
  if (!(a.value.mod == b.value.mod)) throw ArgumentError("modulus mismatch");
  return add(a.value, b.value);
}

bool reconstruct(const BoolShare& a, const BoolShare& b) { return (a.bit ^ b.bit) & 1; }

ArithShare share_of_public(const RingValue& x, int party, int holder) {
  if (party == holder) return {x, party};
  return {RingValue(0, x.mod), party};
}

std::pair<std::vector<u64>, std::vector<u64>> share_vec(const Modulus& m, std::span<const u64> x, Prg& rng) {
  std::vector<u64> a(x.size()), b(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    a[i] = rng.uniform(m);
    b[i] = m.sub(m.reduce(x[i]), a[i]);
  }
  return {std::move(a), std::move(b)};
}

std::vector<u64> reconstruct_vec(const Modulus& m, std::span<const u64> a, std::span<const u64> b) {
  if (a.size() != b.size()) throw ArgumentError("share length mismatch");
  std::vector<u64> out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = m.add(a[i], b[i]);
  return out;
}

std::vector<u8> reconstruct_bits(std::span<const u8> a, std::span<const u8> b) {
  if (a.size() != b.size()) throw ArgumentError("share length mismatch");
  std::vector<u8> out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = (a[i] ^ b[i]) & 1;
  return out;
}

}  // namespace s2pc
