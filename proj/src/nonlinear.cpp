#include "s2pc/nonlinear.hpp"

#include "s2pc/compare.hpp"
#include "s2pc/gates.hpp"
#include "s2pc/truncdiv.hpp"

namespace s2pc {

namespace {

size_t windows(std::span<const u64> a, size_t d) {
  if (d == 0 || a.empty()) throw ArgumentError("pool over an empty window");
  if (a.size() % d != 0) throw ArgumentError("input length is not a multiple of the window size");
  return a.size() / d;
}

struct Chain {
  std::vector<u64> best, index;
};

// best_i = a_i if a_i > best_{i-1}, else best_{i-1}; index follows the same
// selection so a tie keeps the earlier element.
Chain chain(Session& s, const Modulus& ring, std::span<const u64> a, size_t d, bool with_index) {
  size_t W = windows(a, d);
  bool p0 = s.party() == 0;
  Chain c;
  c.best.resize(W);
  c.index.assign(W, 0);
  for (size_t w = 0; w < W; ++w) c.best[w] = a[w * d];
  std::vector<u64> diff(W), sel;
  for (size_t i = 1; i < d; ++i) {
    for (size_t w = 0; w < W; ++w) diff[w] = ring.sub(c.best[w], a[w * d + i]);
    auto v = drelu(s, ring, diff);
    for (auto& b : v) b ^= static_cast<u8>(p0);  // 1{a_i > best}
    sel.assign(with_index ? 2 * W : W, 0);
    std::vector<u8> cv(sel.size());
    for (size_t w = 0; w < W; ++w) {
      sel[w] = ring.neg(diff[w]);
      cv[w] = v[w];
      if (with_index) {
        sel[W + w] = ring.sub(p0 ? ring.reduce(static_cast<i128>(i)) : 0, c.index[w]);
        cv[W + w] = v[w];
      }
    }
    auto m = mux(s, ring, sel, cv);
    for (size_t w = 0; w < W; ++w) {
      c.best[w] = ring.add(c.best[w], m[w]);
      if (with_index) c.index[w] = ring.add(c.index[w], m[W + w]);
    }
  }
  return c;
}

}  // namespace

std::vector<u64> relu(Session& s, const Modulus& ring, std::span<const u64> a) {
  if (a.empty()) return {};
  auto v = drelu(s, ring, a);
  return mux(s, ring, a, v);
}

std::vector<u64> maxpool(Session& s, const Modulus& ring, std::span<const u64> a, size_t d) {
  return chain(s, ring, a, d, false).best;
}

std::vector<u64> argmax(Session& s, const Modulus& ring, std::span<const u64> a, size_t d) {
  return chain(s, ring, a, d, true).index;
}

std::vector<u64> avgpool(Session& s, const Modulus& ring, std::span<const u64> a, size_t d) {
  size_t W = windows(a, d);
  std::vector<u64> sum(W, 0);
  for (size_t w = 0; w < W; ++w)
    for (size_t i = 0; i < d; ++i) sum[w] = ring.add(sum[w], a[w * d + i]);
  return div_ring(s, ring, sum, d);
}

}  // namespace s2pc
