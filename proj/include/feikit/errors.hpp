#pragma once

#include <stdexcept>
#include <string>

namespace feikit {

/// Base class for all feikit errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed textual input (truth-table files, tree DSL, CSV, manifests).
struct ParseError : Error {
  using Error::Error;
};

/// Precondition or invariant violation (variable count out of range,
/// bias outside (-1,1), unbalanced function where balance is required, ...).
struct DomainError : Error {
  using Error::Error;
};

/// Caller asked the protocol to encode a set outside the spectral support.
struct SupportError : Error {
  using Error::Error;
};

/// Malformed transcript handed to the decoder.
struct TranscriptError : ParseError {
  using ParseError::ParseError;
};

}  // namespace feikit
