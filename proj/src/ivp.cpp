#include "rodbench/ivp.hpp"

namespace rodbench {

namespace {

using State12 = Eigen::Matrix<double, 12, 1>;  // sigma(3), r(3), Lambda(6)
using State9 = Eigen::Matrix<double, 9, 1>;    // kappa(3), x(3), r(3)

}  // namespace

RodShape integrate_cosserat_ivp(DeformationModel model, const ReferenceStrain& reference,
                                const StiffnessMatrix& stiffness, double length,
                                const Twist& load, const Twist& lambda0, int steps) {
    if (steps < 50) throw DimensionMismatch("cosserat IVP needs at least 50 steps");
    reference.validate(model);

    Mat6 k = stiffness.normalized(length);
    auto mask = mode_mask(model);
    Vec6 compliance = Vec6::Zero();
    for (int i = 0; i < 6; ++i) {
        if (!mask[static_cast<std::size_t>(i)]) continue;
        if (!(k(i, i) > 0.0)) throw InvalidGeometry("stiffness must be positive on enabled modes");
        compliance[i] = 1.0 / k(i, i);
    }
    Vec6 chi_bar = reference.value.vector();
    auto close_strain = [&](const Vec6& lambda) {
        return Twist(Vec6(chi_bar + compliance.cwiseProduct(lambda)));
    };

    RodShape shape;
    shape.length_m = length;
    shape.tau.resize(static_cast<std::size_t>(steps) + 1);
    shape.poses.resize(shape.tau.size());
    shape.strains.resize(shape.tau.size());

    double h = 1.0 / steps;
    Pose node = Pose::Identity();
    Vec6 lambda = lambda0.vector();
    shape.tau[0] = 0.0;
    shape.poses[0] = node;
    shape.strains[0] = close_strain(lambda);

    for (int i = 0; i < steps; ++i) {
        const Mat3 Rn = node.rotation;
        auto rhs = [&](double /*t*/, const State12& u) {
            Mat3 R = Rn * exp_so3(u.head<3>());
            Twist chi = close_strain(u.tail<6>());
            Twist lam(Vec6(u.tail<6>()));
            Twist dlam = ad_transpose_apply(chi, lam);
            State12 du;
            du.segment<3>(0) = dexpinv_so3(Vec3(-u.head<3>())) * chi.angular;
            du.segment<3>(3) = R * chi.linear;
            du.segment<3>(6) = dlam.angular + R.transpose() * load.angular;
            du.segment<3>(9) = dlam.linear + R.transpose() * load.linear;
            return du;
        };
        State12 u = State12::Zero();
        u.segment<3>(3) = node.position;
        u.tail<6>() = lambda;
        try {
            u = detail::rk4_step<12>(rhs, u, i * h, h);
        } catch (const NearSingular&) {
            throw IntegrationDiverged("cosserat IVP left the per-step trust region");
        }
        if (!u.allFinite()) throw IntegrationDiverged("cosserat IVP produced non-finite state");
        node.rotation = Rn * exp_so3(u.head<3>());
        node.position = u.segment<3>(3);
        lambda = u.tail<6>();
        shape.tau[static_cast<std::size_t>(i) + 1] = (i + 1) * h;
        shape.poses[static_cast<std::size_t>(i) + 1] = node;
        shape.strains[static_cast<std::size_t>(i) + 1] = close_strain(lambda);
    }
    shape.tau.back() = 1.0;
    return shape;
}

RodShape integrate_kirchhoff_ivp(const Vec3& kappa0, const Vec3& base_force,
                                 const StiffnessMatrix& stiffness, int steps,
                                 double length_m, bool* used_fallback) {
    if (steps < 50) throw DimensionMismatch("kirchhoff IVP needs at least 50 steps");
    const Mat3& kbt = stiffness.bending_torsion;
    Vec3 kbt_inv_diag(1.0 / kbt(0, 0), 1.0 / kbt(1, 1), 1.0 / kbt(2, 2));
    if (used_fallback) *used_fallback = false;

    auto rhs = [&](double /*t*/, const State9& u) {
        Vec3 kappa = u.head<3>();
        Vec3 x = u.segment<3>(3);
        Vec3 f_body = exp_so3(Vec3(-x)) * base_force;
        State9 du;
        du.head<3>() = -kbt_inv_diag.cwiseProduct(
            kappa.cross(Vec3(kbt * kappa)) + Vec3::UnitX().cross(f_body));
        du.segment<3>(3) = dexpinv_so3(Vec3(-x)) * kappa;  // may throw NearSingular
        du.segment<3>(6) = exp_so3(x).col(0);
        return du;
    };

    try {
        RodShape shape;
        shape.length_m = length_m;
        shape.tau.resize(static_cast<std::size_t>(steps) + 1);
        shape.poses.resize(shape.tau.size());
        shape.strains.resize(shape.tau.size());
        double h = 1.0 / steps;
        State9 u = State9::Zero();
        u.head<3>() = kappa0;
        for (int i = 0; i <= steps; ++i) {
            shape.tau[static_cast<std::size_t>(i)] = (i == steps) ? 1.0 : i * h;
            shape.poses[static_cast<std::size_t>(i)] = Pose(exp_so3(u.segment<3>(3)), u.segment<3>(6));
            shape.strains[static_cast<std::size_t>(i)] = Twist(u.head<3>(), Vec3::UnitX());
            if (i == steps) break;
            u = detail::rk4_step<9>(rhs, u, i * h, h);
            if (!u.allFinite()) throw IntegrationDiverged("kirchhoff IVP produced non-finite state");
        }
        return shape;
    } catch (const NearSingular&) {
        // |x| crossed a 2*pi shell: integrate the same dynamics in pose form,
        // which has no canonical-coordinate singularity.
        if (used_fallback) *used_fallback = true;
        Vec3 kappa = kappa0;
        RodShape shape;
        shape.length_m = length_m;
        shape.tau.resize(static_cast<std::size_t>(steps) + 1);
        shape.poses.resize(shape.tau.size());
        shape.strains.resize(shape.tau.size());
        double h = 1.0 / steps;
        Pose node = Pose::Identity();
        shape.tau[0] = 0.0;
        shape.poses[0] = node;
        shape.strains[0] = Twist(kappa, Vec3::UnitX());
        for (int i = 0; i < steps; ++i) {
            const Mat3 Rn = node.rotation;
            // state: sigma(3), r(3), kappa(3)
            auto prhs = [&](double /*t*/, const State9& u) {
                Mat3 R = Rn * exp_so3(u.head<3>());
                Vec3 kap = u.tail<3>();
                Vec3 f_body = R.transpose() * base_force;
                State9 du;
                du.head<3>() = dexpinv_so3(Vec3(-u.head<3>())) * kap;
                du.segment<3>(3) = R.col(0);
                du.tail<3>() = -kbt_inv_diag.cwiseProduct(
                    kap.cross(Vec3(kbt * kap)) + Vec3::UnitX().cross(f_body));
                return du;
            };
            State9 u = State9::Zero();
            u.segment<3>(3) = node.position;
            u.tail<3>() = kappa;
            try {
                u = detail::rk4_step<9>(prhs, u, i * h, h);
            } catch (const NearSingular&) {
                throw IntegrationDiverged("kirchhoff IVP left the per-step trust region");
            }
            if (!u.allFinite()) throw IntegrationDiverged("kirchhoff IVP produced non-finite state");
            node.rotation = Rn * exp_so3(u.head<3>());
            node.position = u.segment<3>(3);
            kappa = u.tail<3>();
            shape.tau[static_cast<std::size_t>(i) + 1] = (i + 1) * h;
            shape.poses[static_cast<std::size_t>(i) + 1] = node;
            shape.strains[static_cast<std::size_t>(i) + 1] = Twist(kappa, Vec3::UnitX());
        }
        shape.tau.back() = 1.0;
        return shape;
    }
}

}  // namespace rodbench
