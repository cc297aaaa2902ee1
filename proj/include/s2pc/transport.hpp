#pragma once

#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "s2pc/ring.hpp"

namespace s2pc {

enum class Tag : u32 {
  Handshake = 1,
  OtCorrection = 2,
  OtPayload = 3,
  AndOpen = 4,
  InputShare = 5,
  OutputShare = 6,
  Reveal = 7,
  User = 100,
};

constexpr size_t kFrameHeader = 12;  // length, tag, round

// Moves whole encoded frames between the two endpoints.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual void write(std::vector<u8> frame) = 0;
  virtual std::vector<u8> read() = 0;
  virtual void close() = 0;
};

std::pair<std::unique_ptr<Transport>, std::unique_ptr<Transport>> make_memory_pair();

class TcpListener {
 public:
  explicit TcpListener(u32 port, const std::string& host = "0.0.0.0");
  ~TcpListener();
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;
  u32 port() const { return port_; }
  std::unique_ptr<Transport> accept();

 private:
  int fd_ = -1;
  u32 port_ = 0;
};

std::unique_ptr<Transport> tcp_connect(const std::string& host, u32 port, int timeout_ms = 10000);

struct Meter {
  u64 bits_sent = 0;
  u64 bits_received = 0;
  u64 analytic_bits = 0;
  u64 rounds = 0;
  u64 frames_sent = 0;

  Meter operator-(const Meter& o) const {
    return {bits_sent - o.bits_sent, bits_received - o.bits_received, analytic_bits - o.analytic_bits,
            rounds - o.rounds, frames_sent - o.frames_sent};
  }
  bool operator==(const Meter&) const = default;
};

// One party's endpoint. Round stamps follow a logical clock: a send is stamped
// one past the latest round this party has observed, and a receive advances the
// clock past both the incoming stamp and this party's own last send.
class Channel {
 public:
  Channel(int party, std::unique_ptr<Transport> t);
  ~Channel();
  Channel(const Channel&) = delete;
  Channel& operator=(const Channel&) = delete;

  int party() const { return party_; }
  void send(Tag tag, std::span<const u8> bytes);
  std::vector<u8> recv(Tag tag);
  std::vector<u8> recv(Tag tag, size_t len);
  std::vector<u8> exchange(Tag tag, std::span<const u8> bytes);
  void flush() {}
  void close();

  void charge(u64 analytic_bits) { meter_.analytic_bits += analytic_bits; }
  Meter meter() const { return meter_; }
  void reset_meter();
  u64 transcript_digest() const { return digest_; }

 private:
  void absorb(std::span<const u8> bytes);

  int party_;
  std::unique_ptr<Transport> t_;
  Meter meter_;
  u32 clock_ = 0;
  u32 last_send_ = 0;
  u64 digest_ = 0xcbf29ce484222325ULL;
};

}  // namespace s2pc
