#pragma once

#include <span>
#include <vector>

#include "s2pc/session.hpp"

namespace s2pc {

struct ConvShape {
  size_t channels = 1, height = 1, width = 1;  // input
  size_t filters = 1, kh = 1, kw = 1;
  size_t stride = 1, pad = 0;
  size_t out_h() const;
  size_t out_w() const;
};

// Shares of A*B over Z_2^l, where party 0 knows A (M x N, row-major) and B
// (N x K) is shared. Party 1 passes an empty A. Output is M x K.
std::vector<u64> matmul_known_a(Session& s, const Modulus& ring, size_t M, size_t N, size_t K,
                                std::span<const u64> A, std::span<const u64> B);

// Input laid out C x H x W, weights F x C x kh x kw (party 0 only), output
// F x out_h x out_w. Padding is zero.
std::vector<u64> conv2d(Session& s, const Modulus& ring, const ConvShape& shape, std::span<const u64> weights,
                        std::span<const u64> input);

// Column matrix (C*kh*kw) x (out_h*out_w) of the input; padded cells are 0.
std::vector<u64> im2col(const ConvShape& shape, std::span<const u64> input);

// Shares of w[i] * x[i] with w known to party 0.
std::vector<u64> mul_known_elementwise(Session& s, const Modulus& ring, std::span<const u64> w,
                                       std::span<const u64> x);

// Restores the scale after a product of two scale-s values.
std::vector<u64> scale_correct(Session& s, const Modulus& ring, std::span<const u64> x, unsigned shift,
                               bool known_nonnegative = false);

}  // namespace s2pc
