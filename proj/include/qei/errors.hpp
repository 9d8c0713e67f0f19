#pragma once

#include <stdexcept>
#include <string>

namespace qei {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// f'(x) <= 0 somewhere it must be positive.
struct NonMonotone : Error {
    using Error::Error;
};

// A Moebius map's pole falls inside the declared domain.
struct PoleInDomain : Error {
    using Error::Error;
};

// Negative shock energy times delay exceeds the quantum-inequality budget.
struct InadmissibleShock : Error {
    using Error::Error;
};

// Pointwise evaluation requested at a declared kink.
struct KinkEvaluation : Error {
    using Error::Error;
};

struct CoincidentPoints : Error {
    using Error::Error;
};

// Adaptive refinement could not reach the requested tolerance.
struct QuadratureFailure : Error {
    using Error::Error;
};

// An integration domain could not be truncated within the tail bound.
struct TruncationFailure : Error {
    using Error::Error;
};

// Successive point-splitting estimates grow instead of settling.
struct ExtrapolationDivergence : Error {
    using Error::Error;
};

// Gedanken-scenario ordering invariants violated.
struct ScenarioOrderViolation : Error {
    using Error::Error;
};

// Attempt to serialize a segment with no closed-form representation,
// or to parse a malformed document.
struct SerializationError : Error {
    using Error::Error;
};

// Bad CLI / sweep configuration.
struct ConfigError : Error {
    using Error::Error;
};

// Argument outside a function's domain of definition.
struct DomainError : Error {
    using Error::Error;
};

} // namespace qei
