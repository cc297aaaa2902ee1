#include "s2pc/linear.hpp"

#include "s2pc/ot.hpp"
#include "s2pc/truncdiv.hpp"

namespace s2pc {

namespace {

void need_pow2(const Modulus& ring) {
  if (!ring.is_pow2()) throw ArgumentError("linear layers need Z_2^l");
}

// Shares of w[i][lane] * x1[i], where x1 is party 1's share and w is known to
// party 0. Bit j of x1 selects w mod 2^(l-j) through one correlated OT, so the
// products need l COT instances per element regardless of the lane count.
std::vector<u64> times_peer_share(Session& s, const Modulus& ring, size_t count, size_t lanes,
                                  std::span<const u64> w, std::span<const u64> x1) {
  unsigned l = ring.bits();
  bool p0 = s.party() == 0;
  std::vector<u64> out(count * lanes, 0);
  if (count == 0 || lanes == 0) return out;
  OtFlow f(s);
  std::vector<size_t> h(l);
  for (unsigned j = 0; j < l; ++j) {
    auto sub = Modulus::pow2(l - j);
    if (p0) {
      std::vector<u64> corr(w.begin(), w.end());
      h[j] = f.send_cot(sub, static_cast<unsigned>(lanes), std::move(corr));
    } else {
      std::vector<u8> ch(count);
      for (size_t i = 0; i < count; ++i) ch[i] = (x1[i] >> j) & 1;
      h[j] = f.recv_cot(sub, static_cast<unsigned>(lanes), std::move(ch));
    }
  }
  f.run();
  for (unsigned j = 0; j < l; ++j) {
    const auto& r = f.out(h[j]);
    u64 scale = u64{1} << j;
    for (size_t i = 0; i < out.size(); ++i) {
      u64 v = ring.mul(r[i], scale);
      out[i] = p0 ? ring.sub(out[i], v) : ring.add(out[i], v);
    }
  }
  return out;
}

}  // namespace

size_t ConvShape::out_h() const {
  if (stride == 0 || height + 2 * pad < kh) throw ArgumentError("filter does not fit the padded input");
  return (height + 2 * pad - kh) / stride + 1;
}

size_t ConvShape::out_w() const {
  if (stride == 0 || width + 2 * pad < kw) throw ArgumentError("filter does not fit the padded input");
  return (width + 2 * pad - kw) / stride + 1;
}

std::vector<u64> matmul_known_a(Session& s, const Modulus& ring, size_t M, size_t N, size_t K,
                                std::span<const u64> A, std::span<const u64> B) {
  need_pow2(ring);
  bool p0 = s.party() == 0;
  if (B.size() != N * K || (p0 && A.size() != M * N)) throw ArgumentError("matrix dimensions do not match");

  // Instance (k, n) carries column n of A, one lane per output row.
  std::vector<u64> w, x1;
  if (p0) {
    w.resize(K * N * M);
    for (size_t k = 0; k < K; ++k)
      for (size_t n = 0; n < N; ++n)
        for (size_t m = 0; m < M; ++m) w[(k * N + n) * M + m] = A[m * N + n];
  } else {
    x1.resize(K * N);
    for (size_t k = 0; k < K; ++k)
      for (size_t n = 0; n < N; ++n) x1[k * N + n] = B[n * K + k];
  }
  auto prod = times_peer_share(s, ring, K * N, M, w, x1);

  std::vector<u64> C(M * K, 0);
  for (size_t m = 0; m < M; ++m)
    for (size_t k = 0; k < K; ++k) {
      u64 acc = 0;
      for (size_t n = 0; n < N; ++n) {
        acc = ring.add(acc, prod[(k * N + n) * M + m]);
        if (p0) acc = ring.add(acc, ring.mul(A[m * N + n], B[n * K + k]));
      }
      C[m * K + k] = acc;
    }
  return C;
}

std::vector<u64> im2col(const ConvShape& sh, std::span<const u64> input) {
  if (input.size() != sh.channels * sh.height * sh.width) throw ArgumentError("input does not match the conv shape");
  size_t oh = sh.out_h(), ow = sh.out_w(), K = oh * ow;
  std::vector<u64> cols(sh.channels * sh.kh * sh.kw * K, 0);
  for (size_t c = 0; c < sh.channels; ++c)
    for (size_t i = 0; i < sh.kh; ++i)
      for (size_t j = 0; j < sh.kw; ++j) {
        size_t row = (c * sh.kh + i) * sh.kw + j;
        for (size_t y = 0; y < oh; ++y)
          for (size_t x = 0; x < ow; ++x) {
            long iy = static_cast<long>(y * sh.stride + i) - static_cast<long>(sh.pad);
            long ix = static_cast<long>(x * sh.stride + j) - static_cast<long>(sh.pad);
            if (iy < 0 || ix < 0 || iy >= static_cast<long>(sh.height) || ix >= static_cast<long>(sh.width)) continue;
            cols[row * K + y * ow + x] = input[(c * sh.height + iy) * sh.width + ix];
          }
      }
  return cols;
}

std::vector<u64> conv2d(Session& s, const Modulus& ring, const ConvShape& shape, std::span<const u64> weights,
                        std::span<const u64> input) {
  size_t N = shape.channels * shape.kh * shape.kw;
  if (s.party() == 0 && weights.size() != shape.filters * N) throw ArgumentError("weights do not match the conv shape");
  auto cols = im2col(shape, input);
  return matmul_known_a(s, ring, shape.filters, N, shape.out_h() * shape.out_w(), weights, cols);
}

std::vector<u64> mul_known_elementwise(Session& s, const Modulus& ring, std::span<const u64> w,
                                       std::span<const u64> x) {
  need_pow2(ring);
  bool p0 = s.party() == 0;
  if (p0 && w.size() != x.size()) throw ArgumentError("scale vector does not match the input");
  auto prod = times_peer_share(s, ring, x.size(), 1, w, x);
  if (p0)
    for (size_t i = 0; i < x.size(); ++i) prod[i] = ring.add(prod[i], ring.mul(w[i], x[i]));
  return prod;
}

std::vector<u64> scale_correct(Session& s, const Modulus& ring, std::span<const u64> x, unsigned shift,
                               bool known_nonnegative) {
  return truncate(s, ring, x, shift, known_nonnegative);
}

}  // namespace s2pc
