#pragma once

#include <stdexcept>
#include <string>

namespace halodet {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Instance or span failed a domain invariant.
struct ValidationError : Error {
    using Error::Error;
};

// Network-level failure. Retryable.
struct TransportError : Error {
    using Error::Error;
};

// Endpoint answered but the payload is unusable (missing logprobs,
// malformed JSON, HTTP 4xx). Not retryable.
struct ProtocolError : Error {
    using Error::Error;
};

// Token offsets do not tile the scored text.
struct CoverageError : Error {
    using Error::Error;
};

// Span proposer returned an empty string; callers fall back to the focus word.
struct EmptyResponseError : Error {
    using Error::Error;
};

// Fewer than two question tokens remain after the exclusion rule.
struct TooFewTokensError : Error {
    using Error::Error;
};

struct DimensionError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct ParseError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace halodet
