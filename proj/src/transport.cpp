#include "s2pc/transport.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <mutex>
#include <thread>

namespace s2pc {

namespace {

void put_u32(u8* p, u32 v) {
  for (int i = 0; i < 4; ++i) p[i] = static_cast<u8>(v >> (8 * i));
}

u32 get_u32(const u8* p) {
  u32 v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<u32>(p[i]) << (8 * i);
  return v;
}

struct Queue {
  std::mutex mu;
  std::condition_variable cv;
  std::deque<std::vector<u8>> items;
  bool closed = false;

  void push(std::vector<u8> f) {
    {
      std::lock_guard<std::mutex> lk(mu);
      items.push_back(std::move(f));
    }
    cv.notify_all();
  }

  std::vector<u8> pop() {
    std::unique_lock<std::mutex> lk(mu);
    cv.wait(lk, [&] { return !items.empty() || closed; });
    if (items.empty()) throw TransportError("peer disconnected");
    auto f = std::move(items.front());
    items.pop_front();
    return f;
  }

  void close() {
    {
      std::lock_guard<std::mutex> lk(mu);
      closed = true;
    }
    cv.notify_all();
  }
};

class MemoryTransport : public Transport {
 public:
  MemoryTransport(std::shared_ptr<Queue> in, std::shared_ptr<Queue> out) : in_(std::move(in)), out_(std::move(out)) {}
  ~MemoryTransport() override { close(); }

  void write(std::vector<u8> frame) override {
    {
      std::lock_guard<std::mutex> lk(out_->mu);
      if (out_->closed) throw TransportError("peer disconnected");
    }
    out_->push(std::move(frame));
  }
  std::vector<u8> read() override { return in_->pop(); }
  void close() override {
    in_->close();
    out_->close();
  }

 private:
  std::shared_ptr<Queue> in_, out_;
};

bool read_full(int fd, u8* p, size_t n) {
  while (n > 0) {
    ssize_t r = ::recv(fd, p, n, 0);
    if (r <= 0) return false;
    p += r;
    n -= static_cast<size_t>(r);
  }
  return true;
}

// A background reader drains the socket so simultaneous large writes from both
// sides cannot block each other.
class TcpTransport : public Transport {
 public:
  explicit TcpTransport(int fd) : fd_(fd) {
    int one = 1;
    setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    reader_ = std::thread([this] { loop(); });
  }
  ~TcpTransport() override {
    close();
    if (reader_.joinable()) reader_.join();
    ::close(fd_);
  }

  void write(std::vector<u8> frame) override {
    const u8* p = frame.data();
    size_t n = frame.size();
    while (n > 0) {
      ssize_t w = ::send(fd_, p, n, MSG_NOSIGNAL);
      if (w <= 0) throw TransportError("tcp send failed");
      p += w;
      n -= static_cast<size_t>(w);
    }
  }
  std::vector<u8> read() override { return q_.pop(); }
  void close() override {
    if (!shut_.exchange(true)) ::shutdown(fd_, SHUT_RDWR);
    q_.close();
  }

 private:
  void loop() {
    for (;;) {
      u8 len[4];
      if (!read_full(fd_, len, 4)) break;
      u32 n = get_u32(len);
      std::vector<u8> frame(4 + n);
      std::memcpy(frame.data(), len, 4);
      if (!read_full(fd_, frame.data() + 4, n)) break;
      q_.push(std::move(frame));
    }
    q_.close();
  }

  int fd_;
  Queue q_;
  std::atomic<bool> shut_{false};
  std::thread reader_;
};

}  // namespace

std::pair<std::unique_ptr<Transport>, std::unique_ptr<Transport>> make_memory_pair() {
  auto a = std::make_shared<Queue>();
  auto b = std::make_shared<Queue>();
  return {std::make_unique<MemoryTransport>(a, b), std::make_unique<MemoryTransport>(b, a)};
}

TcpListener::TcpListener(u32 port, const std::string& host) {
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd_ < 0) throw TransportError("socket failed");
  int one = 1;
  setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(static_cast<uint16_t>(port));
  if (inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) throw TransportError("bad listen address " + host);
  if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 || ::listen(fd_, 1) < 0) {
    ::close(fd_);
    throw TransportError("cannot listen on port " + std::to_string(port));
  }
  socklen_t len = sizeof addr;
  getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

TcpListener::~TcpListener() {
  if (fd_ >= 0) ::close(fd_);
}

std::unique_ptr<Transport> TcpListener::accept() {
  int c = ::accept(fd_, nullptr, nullptr);
  if (c < 0) throw TransportError("accept failed");
  return std::make_unique<TcpTransport>(c);
}

std::unique_ptr<Transport> tcp_connect(const std::string& host, u32 port, int timeout_ms) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &res) != 0 || !res)
    throw TransportError("cannot resolve " + host);
  auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
  for (;;) {
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd >= 0 && ::connect(fd, res->ai_addr, res->ai_addrlen) == 0) {
      freeaddrinfo(res);
      return std::make_unique<TcpTransport>(fd);
    }
    if (fd >= 0) ::close(fd);
    if (std::chrono::steady_clock::now() > deadline) {
      freeaddrinfo(res);
      throw TransportError("cannot connect to " + host + ":" + std::to_string(port));
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
}

Channel::Channel(int party, std::unique_ptr<Transport> t) : party_(party), t_(std::move(t)) {
  if (party != 0 && party != 1) throw ArgumentError("party must be 0 or 1");
}

Channel::~Channel() = default;

void Channel::absorb(std::span<const u8> bytes) {
  for (u8 b : bytes) {
    digest_ ^= b;
    digest_ *= 0x100000001b3ULL;
  }
}

void Channel::send(Tag tag, std::span<const u8> bytes) {
  u32 stamp = clock_ + 1;
  std::vector<u8> frame(kFrameHeader + bytes.size());
  put_u32(frame.data(), static_cast<u32>(8 + bytes.size()));
  put_u32(frame.data() + 4, static_cast<u32>(tag));
  put_u32(frame.data() + 8, stamp);
  if (!bytes.empty()) std::memcpy(frame.data() + kFrameHeader, bytes.data(), bytes.size());
  absorb(frame);
  meter_.bits_sent += 8 * frame.size();
  meter_.frames_sent += 1;
  last_send_ = stamp;
  meter_.rounds = std::max<u64>(meter_.rounds, stamp);
  t_->write(std::move(frame));
}

std::vector<u8> Channel::recv(Tag tag) {
  std::vector<u8> frame = t_->read();
  if (frame.size() < kFrameHeader || get_u32(frame.data()) != frame.size() - 4)
    throw ProtocolError("malformed frame");
  u32 got = get_u32(frame.data() + 4);
  if (got != static_cast<u32>(tag))
    throw ProtocolError("frame tag mismatch: expected " + std::to_string(static_cast<u32>(tag)) + ", got " +
                        std::to_string(got));
  u32 stamp = get_u32(frame.data() + 8);
  absorb(frame);
  meter_.bits_received += 8 * frame.size();
  clock_ = std::max({clock_, stamp, last_send_});
  meter_.rounds = std::max<u64>(meter_.rounds, clock_);
  return {frame.begin() + kFrameHeader, frame.end()};
}

std::vector<u8> Channel::recv(Tag tag, size_t len) {
  auto b = recv(tag);
  if (b.size() != len)
    throw ProtocolError("payload size " + std::to_string(b.size()) + ", expected " + std::to_string(len));
  return b;
}

std::vector<u8> Channel::exchange(Tag tag, std::span<const u8> bytes) {
  send(tag, bytes);
  return recv(tag, bytes.size());
}

void Channel::close() { t_->close(); }

void Channel::reset_meter() {
  meter_ = Meter{};
  clock_ = 0;
  last_send_ = 0;
}

}  // namespace s2pc
