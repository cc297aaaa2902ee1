#pragma once

#include <algorithm>
#include <vector>

#include "s2pc/errors.hpp"
#include "s2pc/ring.hpp"

namespace s2pc {

inline u64 low_mask(unsigned w) { return w >= 64 ? ~u64{0} : (u64{1} << w) - 1; }

class BitWriter {
 public:
  void put(u64 v, unsigned w) {
    v &= low_mask(w);
    while (w > 0) {
      unsigned take = std::min(w, 64 - fill_);
      acc_ |= (take == 64 ? v : (v & low_mask(take))) << fill_;
      fill_ += take;
      w -= take;
      v = take == 64 ? 0 : v >> take;
      if (fill_ == 64) spill();
    }
  }
  void put_u64(u64 v) { put(v, 64); }
  std::vector<u8> finish() {
    for (unsigned i = 0; i < fill_; i += 8) buf_.push_back(static_cast<u8>(acc_ >> i));
    acc_ = 0;
    fill_ = 0;
    return std::move(buf_);
  }

 private:
  void spill() {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<u8>(acc_ >> (8 * i)));
    acc_ = 0;
    fill_ = 0;
  }
  std::vector<u8> buf_;
  u64 acc_ = 0;
  unsigned fill_ = 0;
};

class BitReader {
 public:
  explicit BitReader(const std::vector<u8>& b) : b_(b) {}
  u64 get(unsigned w) {
    if (pos_ + w > 8 * b_.size()) throw ProtocolError("payload too short");
    u64 v = 0;
    for (unsigned done = 0; done < w;) {
      size_t byte = pos_ / 8;
      unsigned off = pos_ % 8;
      unsigned take = std::min(8 - off, w - done);
      v |= static_cast<u64>((b_[byte] >> off) & low_mask(take)) << done;
      done += take;
      pos_ += take;
    }
    return v;
  }
  u64 get_u64() { return get(64); }
  void skip(size_t w) { pos_ += w; }
  size_t remaining() const { return 8 * b_.size() - pos_; }

 private:
  const std::vector<u8>& b_;
  size_t pos_ = 0;
};

// Reads w bits starting at bit position pos of a word array.
inline u64 word_bits(const u64* words, size_t pos, unsigned w) {
  size_t i = pos / 64;
  unsigned off = pos % 64;
  u64 v = words[i] >> off;
  if (off + w > 64 && off != 0) v |= words[i + 1] << (64 - off);
  return v & low_mask(w);
}

}  // namespace s2pc
