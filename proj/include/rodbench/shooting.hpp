#pragma once

#include <optional>

#include "rodbench/ivp.hpp"
#include "rodbench/rod.hpp"
#include "rodbench/types.hpp"

namespace rodbench {

/// Two-point boundary conditions. The base pose is the identity; `tip` is
/// the desired pose of the cross-section at tau = 1, in base coordinates
/// with the position in units of the rod length. `rotation_hint`, when set,
/// carries the canonical coordinates that generated the tip rotation and
/// disambiguates the logarithm branch at half-turn targets.
struct BoundaryConditions {
    Pose tip;
    std::optional<Vec3> rotation_hint;
};

/// Shooting unknowns of the inextensible Kirchhoff BVP: base curvature and
/// the constraint force expressed in the base frame.
struct ShootingState {
    Vec3 kappa0 = Vec3::Zero();
    Vec3 base_force = Vec3::Zero();

    Vec6 vector() const {
        Vec6 v;
        v << kappa0, base_force;
        return v;
    }
    static ShootingState from_vector(const Vec6& v) {
        return {v.head<3>(), v.tail<3>()};
    }
};

struct ExactOptions {
    int steps = 200;
    double tol = 1e-7;
    int max_iter = 100;
    double fd_step = 1e-7;
    int max_backtracks = 8;
    bool allow_continuation = true;  // bc-geodesic homotopy when a cold start stalls
};

struct ExactSolution {
    RodShape shape;
    ShootingState state;
    Vec6 residual = Vec6::Zero();

    const SolveDiagnostics& diagnostics() const { return shape.diag; }
};

/// Boundary residual of a tip pose against the desired one: position block
/// followed by the skew-part orientation residual vee(Rd'R - R'Rd).
Vec6 boundary_residual(const Pose& tip, const Pose& desired);

/// Intermediate boundary pose for cold-start continuation: the rotation
/// follows the geodesic from the identity, the position blends from the
/// constant-curvature arc of the partial rotation to the target. Every
/// intermediate stays inside the reachable ball of an inextensible rod.
Pose continuation_bc(const Pose& target, const std::optional<Vec3>& hint, double t);

/// Ground-truth solver: shooting on the exact inextensible-Kirchhoff ODEs
/// with Newton iteration, forward-difference Jacobian and a backtracking
/// line search. `load` is the base-frame distributed wrench per unit tau
/// (usually gravity_load(props) or zero).
ExactSolution solve_exact_bvp(const BoundaryConditions& bc, const RodProperties& props,
                              const Twist& load = Twist::Zero(),
                              const std::optional<ShootingState>& guess = std::nullopt,
                              const ExactOptions& options = {});

}  // namespace rodbench
