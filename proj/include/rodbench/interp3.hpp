#pragma once

#include <optional>

#include "rodbench/quadrature.hpp"
#include "rodbench/rod.hpp"
#include "rodbench/shooting.hpp"
#include "rodbench/types.hpp"

namespace rodbench {

/// Unknowns of the third-order model: curvatures at the rod extremities and
/// the tip canonical coordinates (principal log of the desired tip rotation).
struct InterpParams {
    Vec3 kappa0 = Vec3::Zero();
    Vec3 kappa1 = Vec3::Zero();
    Vec3 x1 = Vec3::Zero();
};

struct InterpOptions {
    int quad_order = 5;   // Gauss points per panel
    int panels = 8;       // composite panels over the arc parameter
    double tol = 1e-7;
    double polish_tol = 1e-10;  // keep iterating below tol while progress lasts
    int max_iter = 200;
    double damping0 = 1e-10;  // Levenberg diagonal added to the KKT matrix
    double fd_step = 1e-6;    // central-difference step for the gradients
    int grid_steps = 200;     // sampling grid of the returned shape
    bool allow_continuation = true;
};

/// Cubic interpolant of the angular canonical coordinates; x(0)=0, x(1)=x1,
/// x'(0)=kappa0 and the tip slope reproduces kappa1 through dexpinv.
Vec3 interp_x(double tau, const InterpParams& p);
Vec3 interp_dx(double tau, const InterpParams& p);

/// Curvature field recovered from the interpolant, kappa = dexp_{-x} x'.
Vec3 interp_kappa(double tau, const InterpParams& p);

/// Centreline point integrated from r' = exp(x~) e1 by composite
/// Gauss-Legendre quadrature.
Vec3 interp_position(double tau, const InterpParams& p, int quad_order = 5, int panels = 8);

/// Bending/torsion energy of the interpolated field per unit tau.
double interp_energy(const InterpParams& p, const Mat3& k_bt,
                     const Vec3& kappa_bar = Vec3::Zero(), int quad_order = 5, int panels = 8);

/// Stacked stationarity conditions of the constrained minimisation:
/// [dL/dkappa0; dL/dkappa1; g] with L = V + lambda . g and
/// g = r(1) - r_des. Gradients by central differences.
Eigen::Matrix<double, 9, 1> interp_kkt_residual(const InterpParams& p, const Vec3& lambda,
                                                const Vec3& r_des, const Mat3& k_bt,
                                                const InterpOptions& opt = {});

struct InterpSolution {
    RodShape shape;
    InterpParams params;
    Vec3 multiplier = Vec3::Zero();
    double energy = 0.0;

    const SolveDiagnostics& diagnostics() const { return shape.diag; }
};

/// Minimum-energy third-order shape meeting the tip position; the tip
/// orientation is satisfied by construction. Newton-Raphson on the KKT
/// system with Levenberg-style damping.
InterpSolution solve_interp(const BoundaryConditions& bc, const RodProperties& props,
                            const std::optional<InterpParams>& guess = std::nullopt,
                            const InterpOptions& options = {});

}  // namespace rodbench
