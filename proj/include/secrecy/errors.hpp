#pragma once

#include <stdexcept>
#include <string>

namespace secrecy {

// Base class for all domain errors raised by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SchemaError : Error {
    using Error::Error;
};
struct ValidationError : Error {
    using Error::Error;
};
struct DimensionMismatch : Error {
    using Error::Error;
};
struct UnknownVariable : Error {
    using Error::Error;
};
struct OverlappingSets : Error {
    using Error::Error;
};
struct NotCommonOutput : Error {
    using Error::Error;
};
struct MarkovViolation : Error {
    using Error::Error;
};
struct EmptyRegion : Error {
    using Error::Error;
};
struct CapacityOverflow : Error {
    using Error::Error;
};
struct CapExceeded : Error {
    using Error::Error;
};
struct NondeterministicChannel : Error {
    using Error::Error;
};
struct PreconditionUnmet : Error {
    using Error::Error;
};
struct IndexOutOfRange : Error {
    using Error::Error;
};

}  // namespace secrecy
