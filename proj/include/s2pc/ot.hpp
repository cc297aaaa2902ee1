#pragma once

#include <optional>
#include <vector>

#include "s2pc/session.hpp"

namespace s2pc {

constexpr u64 kLambda = 128;

// Analytic costs of 1-of-k OT on `bits`-bit messages and correlated OT.
inline u64 kot_cost(u64 k, u64 bits) { return k == 2 ? kLambda + 2 * bits : 2 * kLambda + k * bits; }
inline u64 cot_cost(u64 bits) { return kLambda + bits; }

// A batch of OT instances sharing one correction/payload exchange (2 rounds).
// Both parties must add the matching groups in the same order: a send group on
// one side pairs with a receive group at the same position on the other.
class OtFlow {
 public:
  explicit OtFlow(Session& s) : s_(s) {}

  // 1-of-k OT, `lanes` gives the bit width of each message component.
  // Sender messages are laid out [instance][choice][lane].
  void send_kot(u32 k, std::vector<unsigned> lanes, std::vector<u64> msgs, std::optional<u64> charge = {});
  // Receiver outputs are laid out [instance][lane].
  size_t recv_kot(u32 k, std::vector<unsigned> lanes, std::vector<u32> choices, std::optional<u64> charge = {});

  // Correlated OT over `ring` with `lanes` correlations per instance. The
  // sender obtains random r, the receiver r + b*x, laid out [instance][lane].
  size_t send_cot(const Modulus& ring, unsigned lanes, std::vector<u64> corr, std::optional<u64> charge = {});
  size_t recv_cot(const Modulus& ring, unsigned lanes, std::vector<u8> choices, std::optional<u64> charge = {});

  void run();
  std::vector<u64>& out(size_t handle) { return groups_.at(handle).out; }
  bool empty() const { return groups_.empty(); }

 private:
  struct Group {
    bool kot = true;
    bool sender = false;
    u32 k = 2;
    std::vector<unsigned> lanes;
    Modulus ring = Modulus::pow2(64);
    size_t count = 0;
    std::vector<u64> in;    // sender messages / correlations
    std::vector<u32> choice;
    std::vector<u64> out;
    u64 charge = 0;
    // dealer material
    std::vector<u32> w;
    std::vector<u64> masks;
    unsigned width() const;
  };
  size_t add(Group g);
  void draw(Group& g);

  Session& s_;
  std::vector<Group> groups_;
};

// Single-shot conveniences over one flow.
void ot_send(Session& s, u32 k, unsigned bits, std::vector<u64> msgs);
std::vector<u64> ot_recv(Session& s, u32 k, unsigned bits, std::vector<u32> choices);
std::vector<u64> cot_send(Session& s, const Modulus& ring, std::vector<u64> corr);
std::vector<u64> cot_recv(Session& s, const Modulus& ring, std::vector<u8> choices);

}  // namespace s2pc
