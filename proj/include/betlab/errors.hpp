#pragma once

#include <stdexcept>
#include <string>

namespace betlab {

/// Base class for all betlab error conditions.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NegativeProbability : Error {
    using Error::Error;
};

struct ProbabilitySumOutOfTolerance : Error {
    using Error::Error;
};

/// Cash argument outside a utility function's [0, domain_max] range,
/// or an x outside an AlphaSpec's evaluation range.
struct DomainExceeded : Error {
    using Error::Error;
};

/// u(b+x) - u(a+x) fell below tolerance; the utility is flat or
/// non-monotone over the bracket.
struct DegenerateDenominator : Error {
    using Error::Error;
};

struct KOutOfRange : Error {
    using Error::Error;
};

struct ROutOfRange : Error {
    using Error::Error;
};

struct UnsupportedUtility : Error {
    using Error::Error;
};

struct TooLargeToEnumerate : Error {
    using Error::Error;
};

struct MalformedTree : Error {
    using Error::Error;
};

struct ShapeMismatch : Error {
    using Error::Error;
};

/// Problem-spec / CSV ingestion failure; message carries the field path
/// or line number.
struct ParseError : Error {
    using Error::Error;
};

}  // namespace betlab
