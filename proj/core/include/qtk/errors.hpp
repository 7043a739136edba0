#pragma once

#include <stdexcept>
#include <string>

namespace qtk {

// Base for everything the library throws on purpose.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParamError : Error {
  using Error::Error;
};

// Reading past the end of a BitString.
struct TruncatedStream : Error {
  using Error::Error;
};

// Decoder saw a symbol that no encoder with this config can produce.
struct MalformedStream : Error {
  using Error::Error;
};

// Input outside the region a quantizer is defined on.
struct ContractViolation : Error {
  using Error::Error;
};

}  // namespace qtk
