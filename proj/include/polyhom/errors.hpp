#pragma once

#include <stdexcept>
#include <string>

namespace polyhom {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Two series with different variable tags were combined.
struct VariableMismatchError : Error {
    using Error::Error;
};

/// A requested operation cannot be represented in the active coefficient
/// ring (e.g. a log 2 constant in the exact rational ring).
struct RingCapabilityError : Error {
    using Error::Error;
};

/// A term or argument leaves the representable class (banned exponents,
/// non-differentiable terms, constant term where none is allowed, ...).
struct SeriesDomainError : Error {
    using Error::Error;
};

/// Malformed configuration, file, or command-line input.
struct ConfigError : Error {
    using Error::Error;
};

/// Numeric failure: spectral-radius violation, singular pivot,
/// ill-conditioned basis, too few data points.
struct NumericError : Error {
    using Error::Error;
};

/// Double indicial root at a resonant order; the simple-root ladder
/// does not apply.
struct ResonanceError : Error {
    using Error::Error;
};

/// An internal consistency check failed; indicates a bug, not bad input.
struct InternalCheckError : Error {
    using Error::Error;
};

} // namespace polyhom
