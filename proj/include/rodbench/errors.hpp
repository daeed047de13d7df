#pragma once

#include <stdexcept>
#include <string>

#include "rodbench/types.hpp"

namespace rodbench {

struct RodError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Geometry or material parameter outside its admissible range.
struct InvalidGeometry : RodError {
    using RodError::RodError;
};

/// The angular argument is within the guard band of a dexp singularity
/// (a nonzero multiple of 2*pi).
struct NearSingular : RodError {
    using RodError::RodError;
};

/// An integrated state became non-finite.
struct IntegrationDiverged : RodError {
    using RodError::RodError;
};

/// Requested tip rotation outside the principal-logarithm branch guard.
struct BranchGuard : RodError {
    using RodError::RodError;
};

struct DimensionMismatch : RodError {
    using RodError::RodError;
};

struct GridMismatch : RodError {
    using RodError::RodError;
};

/// Newton iteration exhausted max_iter without meeting the tolerance.
/// Carries the diagnostics of the failed solve.
struct NoConvergence : RodError {
    NoConvergence(const std::string& what, SolveDiagnostics d)
        : RodError(what), diag(d) {}
    SolveDiagnostics diag;
};

struct ParseError : RodError {
    ParseError(const std::string& what, int line_number)
        : RodError(what + " (line " + std::to_string(line_number) + ")"), line(line_number) {}
    int line;
};

/// Gripper markers do not define a frame (degenerate / collinear).
struct FrameError : RodError {
    using RodError::RodError;
};

struct IoError : RodError {
    using RodError::RodError;
};

}  // namespace rodbench
