#pragma once

#include <array>
#include <string>

#include "rodbench/types.hpp"

namespace rodbench {

/// Geometry and material of a circular-section rod. Density and gravity are
/// optional and only enter when a solver is asked to include distributed
/// weight.
struct RodProperties {
    double length = 1.0;        // m
    double diameter = 2e-3;     // m
    double youngs = 36.5e9;     // Pa
    double shear = 3e9;         // Pa
    double density = 0.0;       // kg/m^3, 0 = weightless
    Vec3 gravity = Vec3::Zero();  // m/s^2

    double area() const;            // pi d^2 / 4
    double second_moment() const;   // I_y = I_z = pi d^4 / 64
    double polar_moment() const;    // I_x = 2 I_y

    void validate() const;  // throws InvalidGeometry
};

/// Block-diagonal Hooke stiffness, K = diag(G Ix, E Iy, E Iz, E A, G A, G A).
struct StiffnessMatrix {
    Mat3 bending_torsion = Mat3::Zero();   // K_BT, N m^2
    Mat3 shear_extension = Mat3::Zero();   // K_SE, N

    Mat6 full() const;

    /// Stiffness acting on per-tau strains in the length-normalised system:
    /// the angular block is unchanged, the linear block scales by L^2.
    Mat6 normalized(double length) const;
};

StiffnessMatrix build_stiffness(const RodProperties& props);

/// Deformation-mode selections (which strain components are solved for; the
/// rest stay pinned at the reference values).
enum class DeformationModel {
    Cosserat,
    Kirchhoff,
    InextensibleKirchhoff,
    TorsionFreeKirchhoff,
};

/// Enabled-component mask, angular-first ordering.
std::array<bool, 6> mode_mask(DeformationModel model);

const char* to_string(DeformationModel model);

/// Reference deformation; constant along the rod. The default is the
/// straight unstretched configuration (0,0,0,1,0,0).
struct ReferenceStrain {
    Twist value = Twist(Vec3::Zero(), Vec3::UnitX());

    Twist operator()(double /*tau*/) const { return value; }
    void validate(DeformationModel model) const;  // rho_1 = 1 for inextensible
};

/// Forces non-enabled components of a deformation onto their reference
/// values (e.g. the inextensible mask pins rho to e1).
Twist apply_mode_mask(DeformationModel model, const Twist& chi, const ReferenceStrain& ref = {});

/// Elastic energy density per unit tau, 0.5 (k - kbar)' K_BT (k - kbar).
double strain_energy_density(const Vec3& kappa, const Vec3& kappa_bar, const Mat3& k_bt);

/// Distributed weight as the base-frame co-vector W entering the stress ODE
/// Lambda' = ad_chi^T Lambda + W (rotated into the body frame by the
/// solvers). Scales with L^3 because stresses carry the per-tau
/// normalisation. Zero when the rod has no density or gravity configured.
Twist gravity_load(const RodProperties& props);

/// Cross-section pose at tau of a unit-speed rod with constant curvature
/// kappa (per unit tau), base clamped at the identity.
Pose constant_curvature_pose(const Vec3& kappa, double tau);

}  // namespace rodbench
