#include "s2pc/ot.hpp"

#include "s2pc/bitpack.hpp"

namespace s2pc {

namespace {

u64 fnv(u64 h, u64 v) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xff;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

unsigned OtFlow::Group::width() const {
  if (!kot) return static_cast<unsigned>(lanes.size()) * ring.bits();
  unsigned w = 0;
  for (unsigned l : lanes) w += l;
  return w;
}

size_t OtFlow::add(Group g) {
  groups_.push_back(std::move(g));
  return groups_.size() - 1;
}

void OtFlow::send_kot(u32 k, std::vector<unsigned> lanes, std::vector<u64> msgs, std::optional<u64> charge) {
  if (k < 2) throw ArgumentError("1-of-k OT needs k >= 2");
  for (unsigned l : lanes)
    if (l < 1 || l > 64) throw ArgumentError("OT lane width must be 1..64");
  size_t per = static_cast<size_t>(k) * lanes.size();
  if (per == 0 || msgs.size() % per) throw ArgumentError("OT message count is not a multiple of k * lanes");
  Group g;
  g.sender = true;
  g.k = k;
  g.lanes = std::move(lanes);
  g.count = msgs.size() / per;
  g.in = std::move(msgs);
  g.charge = charge ? *charge : g.count * kot_cost(k, g.width());
  add(std::move(g));
}

size_t OtFlow::recv_kot(u32 k, std::vector<unsigned> lanes, std::vector<u32> choices, std::optional<u64> charge) {
  if (k < 2) throw ArgumentError("1-of-k OT needs k >= 2");
  for (unsigned l : lanes)
    if (l < 1 || l > 64) throw ArgumentError("OT lane width must be 1..64");
  if (lanes.empty()) throw ArgumentError("OT needs at least one lane");
  for (u32 c : choices)
    if (c >= k) throw ArgumentError("OT choice out of range");
  Group g;
  g.k = k;
  g.lanes = std::move(lanes);
  g.count = choices.size();
  g.choice = std::move(choices);
  g.charge = charge ? *charge : g.count * kot_cost(k, g.width());
  return add(std::move(g));
}

size_t OtFlow::send_cot(const Modulus& ring, unsigned lanes, std::vector<u64> corr, std::optional<u64> charge) {
  if (lanes == 0 || corr.size() % lanes) throw ArgumentError("COT correlation count is not a multiple of lanes");
  Group g;
  g.kot = false;
  g.sender = true;
  g.ring = ring;
  g.lanes.assign(lanes, ring.bits());
  g.count = corr.size() / lanes;
  g.in = std::move(corr);
  for (auto& x : g.in) x = ring.reduce(x);
  g.charge = charge ? *charge : g.count * cot_cost(g.width());
  return add(std::move(g));
}

size_t OtFlow::recv_cot(const Modulus& ring, unsigned lanes, std::vector<u8> choices, std::optional<u64> charge) {
  if (lanes == 0) throw ArgumentError("COT needs at least one lane");
  Group g;
  g.kot = false;
  g.ring = ring;
  g.lanes.assign(lanes, ring.bits());
  g.count = choices.size();
  g.choice.assign(choices.begin(), choices.end());
  for (auto& c : g.choice) c &= 1;
  g.charge = charge ? *charge : g.count * cot_cost(g.width());
  return add(std::move(g));
}

void OtFlow::draw(Group& g) {
  Dealer& d = s_.dealer();
  g.w.resize(g.count);
  if (g.kot) {
    size_t words = (static_cast<size_t>(g.k) * g.width() + 63) / 64;
    g.masks.resize(g.count * words);
    for (size_t i = 0; i < g.count; ++i) {
      d.take_record();
      g.w[i] = static_cast<u32>(d.below(g.k));
      for (size_t j = 0; j < words; ++j) g.masks[i * words + j] = d.next();
    }
  } else {
    size_t lanes = g.lanes.size();
    g.masks.resize(g.count * 2 * lanes);
    for (size_t i = 0; i < g.count; ++i) {
      d.take_record();
      g.w[i] = static_cast<u32>(d.next() & 1);
      for (size_t j = 0; j < 2 * lanes; ++j) g.masks[i * 2 * lanes + j] = d.uniform(g.ring);
    }
  }
}

void OtFlow::run() {
  if (groups_.empty()) return;
  Channel& ch = s_.ch();
  u64 dig_recv = 0xcbf29ce484222325ULL, dig_send = dig_recv;
  bool any_recv = false, any_send = false;
  for (auto& g : groups_) {
    draw(g);
    u64& h = g.sender ? dig_send : dig_recv;
    h = fnv(h, g.kot);
    h = fnv(h, g.kot ? g.k : static_cast<u64>(g.ring.value()));
    h = fnv(h, g.count);
    for (unsigned l : g.lanes) h = fnv(h, l);
    (g.sender ? any_send : any_recv) = true;
  }

  if (any_recv) {
    BitWriter bw;
    bw.put_u64(dig_recv);
    for (auto& g : groups_) {
      if (g.sender) continue;
      unsigned cbits = g.kot ? ceil_log2(g.k) : 1;
      for (size_t i = 0; i < g.count; ++i) {
        u64 u = g.kot ? (g.choice[i] + g.k - g.w[i]) % g.k : (g.choice[i] ^ g.w[i]);
        bw.put(u, cbits);
      }
    }
    ch.send(Tag::OtCorrection, bw.finish());
  }

  if (any_send) {
    auto corr = ch.recv(Tag::OtCorrection);
    BitReader br(corr);
    if (br.get_u64() != dig_send) throw ProtocolError("OT batch layout differs between parties");
    BitWriter bw;
    bw.put_u64(dig_send);
    for (auto& g : groups_) {
      if (!g.sender) continue;
      size_t L = g.lanes.size();
      if (g.kot) {
        unsigned W = g.width();
        size_t words = (static_cast<size_t>(g.k) * W + 63) / 64;
        unsigned cbits = ceil_log2(g.k);
        for (size_t i = 0; i < g.count; ++i) {
          u64 u = br.get(cbits);
          if (u >= g.k) throw ProtocolError("OT correction out of range");
          const u64* mk = &g.masks[i * words];
          const u64* m = &g.in[i * g.k * L];
          for (u32 j = 0; j < g.k; ++j) {
            size_t pos = static_cast<size_t>((j + g.k - u) % g.k) * W;
            for (size_t l = 0; l < L; ++l) {
              bw.put(m[j * L + l] ^ word_bits(mk, pos, g.lanes[l]), g.lanes[l]);
              pos += g.lanes[l];
            }
          }
        }
      } else {
        const Modulus& R = g.ring;
        g.out.resize(g.count * L);
        for (size_t i = 0; i < g.count; ++i) {
          u64 u = br.get(1);
          const u64* mk = &g.masks[i * 2 * L];
          for (size_t l = 0; l < L; ++l) {
            u64 r = mk[u * L + l];
            u64 other = mk[(1 - u) * L + l];
            g.out[i * L + l] = r;
            bw.put(R.sub(R.add(r, g.in[i * L + l]), other), R.bits());
          }
        }
      }
    }
    ch.send(Tag::OtPayload, bw.finish());
  }

  if (any_recv) {
    auto pay = ch.recv(Tag::OtPayload);
    BitReader br(pay);
    if (br.get_u64() != dig_recv) throw ProtocolError("OT batch layout differs between parties");
    for (auto& g : groups_) {
      if (g.sender) continue;
      size_t L = g.lanes.size();
      g.out.resize(g.count * L);
      if (g.kot) {
        unsigned W = g.width();
        size_t words = (static_cast<size_t>(g.k) * W + 63) / 64;
        for (size_t i = 0; i < g.count; ++i) {
          const u64* mk = &g.masks[i * words];
          u32 c = g.choice[i];
          br.skip(static_cast<size_t>(c) * W);
          size_t pos = static_cast<size_t>(g.w[i]) * W;
          for (size_t l = 0; l < L; ++l) {
            g.out[i * L + l] = br.get(g.lanes[l]) ^ word_bits(mk, pos, g.lanes[l]);
            pos += g.lanes[l];
          }
          br.skip(static_cast<size_t>(g.k - 1 - c) * W);
        }
      } else {
        const Modulus& R = g.ring;
        for (size_t i = 0; i < g.count; ++i) {
          const u64* mk = &g.masks[i * 2 * L];
          for (size_t l = 0; l < L; ++l) {
            u64 y = br.get(R.bits());
            u64 m = mk[g.w[i] * L + l];
            g.out[i * L + l] = g.choice[i] ? R.add(R.reduce(y), m) : m;
          }
        }
      }
    }
  }

  for (auto& g : groups_) {
    ch.charge(g.charge);
    g.masks.clear();
    g.masks.shrink_to_fit();
    g.in.clear();
    g.in.shrink_to_fit();
  }
}

void ot_send(Session& s, u32 k, unsigned bits, std::vector<u64> msgs) {
  OtFlow f(s);
  f.send_kot(k, {bits}, std::move(msgs));
  f.run();
}

std::vector<u64> ot_recv(Session& s, u32 k, unsigned bits, std::vector<u32> choices) {
  OtFlow f(s);
  size_t h = f.recv_kot(k, {bits}, std::move(choices));
  f.run();
  return std::move(f.out(h));
}

std::vector<u64> cot_send(Session& s, const Modulus& ring, std::vector<u64> corr) {
  OtFlow f(s);
  size_t h = f.send_cot(ring, 1, std::move(corr));
  f.run();
  return std::move(f.out(h));
}

std::vector<u64> cot_recv(Session& s, const Modulus& ring, std::vector<u8> choices) {
  OtFlow f(s);
  size_t h = f.recv_cot(ring, 1, std::move(choices));
  f.run();
  return std::move(f.out(h));
}

}  // namespace s2pc
