#pragma once

#include <stdexcept>
#include <string>

namespace iiaffine {

/// Dimension / shape mismatch between operands.
struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct SingularMatrixError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Operand does not reach the affine tier required by the operation.
struct TierError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DegeneratePolytopeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Two bundle sections coincide; no transverse intersection theory applies.
struct NonTransverseError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A stated precondition (closedness, invariance, membership) fails.
struct PreconditionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

} // namespace iiaffine
