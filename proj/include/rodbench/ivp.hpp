#pragma once

#include <utility>

#include "rodbench/errors.hpp"
#include "rodbench/lie.hpp"
#include "rodbench/rod.hpp"
#include "rodbench/types.hpp"

// Fixed-step RK4 integrators for the rod initial value problems. Orientation
// is advanced in per-step exponential coordinates (the local rotation vector
// is re-absorbed into the node rotation after every step), so stored
// rotations are products of exponentials and stay orthonormal to machine
// precision regardless of step count.

namespace rodbench {

namespace detail {

template <int N, class F>
Eigen::Matrix<double, N, 1> rk4_step(const F& f, const Eigen::Matrix<double, N, 1>& y,
                                     double t, double h) {
    using V = Eigen::Matrix<double, N, 1>;
    V k1 = f(t, y);
    V k2 = f(t + 0.5 * h, V(y + 0.5 * h * k1));
    V k3 = f(t + 0.5 * h, V(y + 0.5 * h * k2));
    V k4 = f(t + h, V(y + h * k3));
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace detail

/// Integrate H' = H chi^ for a prescribed strain field chi(tau).
template <class ChiFn>
RodShape integrate_pose_field(ChiFn&& chi, int steps, double length_m = 1.0) {
    if (steps < 2) throw DimensionMismatch("integration needs at least 2 steps");
    RodShape shape;
    shape.length_m = length_m;
    shape.tau.resize(static_cast<std::size_t>(steps) + 1);
    shape.poses.resize(shape.tau.size());
    shape.strains.resize(shape.tau.size());

    double h = 1.0 / steps;
    Pose node = Pose::Identity();
    shape.tau[0] = 0.0;
    shape.poses[0] = node;
    shape.strains[0] = chi(0.0);
    for (int i = 0; i < steps; ++i) {
        double t0 = i * h;
        const Mat3& Rn = node.rotation;
        auto rhs = [&](double t, const Eigen::Matrix<double, 6, 1>& u) {
            Twist c = chi(t);
            Eigen::Matrix<double, 6, 1> du;
            du.head<3>() = dexpinv_so3(Vec3(-u.head<3>())) * c.angular;
            du.tail<3>() = Rn * (exp_so3(u.head<3>()) * c.linear);
            return du;
        };
        Eigen::Matrix<double, 6, 1> u = Eigen::Matrix<double, 6, 1>::Zero();
        u.tail<3>() = node.position;
        try {
            u = detail::rk4_step<6>(rhs, u, t0, h);
        } catch (const NearSingular&) {
            // a per-step rotation near 2*pi means the strain state blew up
            throw IntegrationDiverged("pose integration left the per-step trust region");
        }
        if (!u.allFinite()) throw IntegrationDiverged("pose integration produced non-finite state");
        node.rotation = Rn * exp_so3(u.head<3>());
        node.position = u.tail<3>();
        shape.tau[static_cast<std::size_t>(i) + 1] = (i + 1) * h;
        shape.poses[static_cast<std::size_t>(i) + 1] = node;
        shape.strains[static_cast<std::size_t>(i) + 1] = chi((i + 1) * h);
    }
    shape.tau.back() = 1.0;
    return shape;
}

/// Integrate the constrained Cosserat system
///   H' = H chi^,  Lambda' = ad_chi^T Lambda + W_body
/// with chi = chibar + C Lambda, where the compliance C acts only on the
/// modes enabled by `model` (disabled components stay at the reference and
/// their Lambda entries evolve as reaction stresses). W is the base-frame
/// distributed wrench per unit tau; it is rotated into the body frame at
/// every evaluation point.
RodShape integrate_cosserat_ivp(DeformationModel model, const ReferenceStrain& reference,
                                const StiffnessMatrix& stiffness, double length,
                                const Twist& load, const Twist& lambda0, int steps = 200);

/// Reduced inextensible-Kirchhoff system in canonical coordinates,
///   kappa' = -K_BT^-1 (kappa x K_BT kappa + e1 x exp(-x) f0)
///   x'     = dexpinv_so3(-x) kappa
///   r'     = exp(x) e1
/// with the base-frame constraint force f0 constant (no distributed load).
/// If |x| enters the dexpinv guard band the solve falls back to direct pose
/// integration of the same system; `used_fallback` reports that.
RodShape integrate_kirchhoff_ivp(const Vec3& kappa0, const Vec3& base_force,
                                 const StiffnessMatrix& stiffness, int steps = 200,
                                 double length_m = 1.0, bool* used_fallback = nullptr);

}  // namespace rodbench
