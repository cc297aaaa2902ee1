#pragma once

#include <stdexcept>
#include <string>

namespace s2pc {

struct ArgumentError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct RangeError : std::out_of_range {
  using std::out_of_range::out_of_range;
};

struct DivisionByZero : std::domain_error {
  using std::domain_error::domain_error;
};

// Peer gone, socket failure, truncated frame.
struct TransportError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Desynchronised parties: tag mismatch, reused triple, bad payload size.
struct ProtocolError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Handshake parameter mismatch or exhausted correlated randomness.
struct SetupError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace s2pc
