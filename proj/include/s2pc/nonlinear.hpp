#pragma once

#include <span>
#include <vector>

#include "s2pc/session.hpp"

namespace s2pc {

// Shares of max(signed(a), 0).
std::vector<u64> relu(Session& s, const Modulus& ring, std::span<const u64> a);

// Pools run over a.size() / d windows laid out [window][element]; all windows
// advance through the comparison chain together, so a pool costs d - 1 stages.
std::vector<u64> maxpool(Session& s, const Modulus& ring, std::span<const u64> a, size_t d);

// Shares of the index of the window maximum. On ties the earlier index wins.
std::vector<u64> argmax(Session& s, const Modulus& ring, std::span<const u64> a, size_t d);

// Shares of rdiv(sum of the window, d).
std::vector<u64> avgpool(Session& s, const Modulus& ring, std::span<const u64> a, size_t d);

}  // namespace s2pc
