#include "rodbench/rod.hpp"

#include <cmath>

#include "rodbench/errors.hpp"
#include "rodbench/lie.hpp"

namespace rodbench {

double RodProperties::area() const {
    return M_PI * diameter * diameter / 4.0;
}

double RodProperties::second_moment() const {
    return M_PI * std::pow(diameter, 4) / 64.0;
}

double RodProperties::polar_moment() const {
    return 2.0 * second_moment();
}

void RodProperties::validate() const {
    if (!(length > 0.0)) throw InvalidGeometry("rod length must be positive");
    if (!(diameter > 0.0)) throw InvalidGeometry("rod diameter must be positive");
    if (!(youngs > 0.0)) throw InvalidGeometry("Young's modulus must be positive");
    if (!(shear > 0.0)) throw InvalidGeometry("shear modulus must be positive");
    if (density < 0.0) throw InvalidGeometry("density must be non-negative");
}

Mat6 StiffnessMatrix::full() const {
    Mat6 k = Mat6::Zero();
    k.topLeftCorner<3, 3>() = bending_torsion;
    k.bottomRightCorner<3, 3>() = shear_extension;
    return k;
}

Mat6 StiffnessMatrix::normalized(double length) const {
    Mat6 k = full();
    k.bottomRightCorner<3, 3>() *= length * length;
    return k;
}

StiffnessMatrix build_stiffness(const RodProperties& props) {
    props.validate();
    double a = props.area();
    double iy = props.second_moment();
    double ix = props.polar_moment();
    StiffnessMatrix k;
    k.bending_torsion = Vec3(props.shear * ix, props.youngs * iy, props.youngs * iy).asDiagonal();
    k.shear_extension = Vec3(props.youngs * a, props.shear * a, props.shear * a).asDiagonal();
    return k;
}

std::array<bool, 6> mode_mask(DeformationModel model) {
    switch (model) {
        case DeformationModel::Cosserat:
            return {true, true, true, true, true, true};
        case DeformationModel::Kirchhoff:
            return {true, true, true, true, false, false};
        case DeformationModel::InextensibleKirchhoff:
            return {true, true, true, false, false, false};
        case DeformationModel::TorsionFreeKirchhoff:
            return {false, true, true, true, false, false};
    }
    return {};
}

const char* to_string(DeformationModel model) {
    switch (model) {
        case DeformationModel::Cosserat: return "cosserat";
        case DeformationModel::Kirchhoff: return "kirchhoff";
        case DeformationModel::InextensibleKirchhoff: return "inextensible-kirchhoff";
        case DeformationModel::TorsionFreeKirchhoff: return "torsion-free-kirchhoff";
    }
    return "?";
}

void ReferenceStrain::validate(DeformationModel model) const {
    if (model == DeformationModel::InextensibleKirchhoff &&
        std::abs(value.linear.x() - 1.0) > 0.0)
        throw InvalidGeometry("inextensible models require reference rho_1 = 1");
}

Twist apply_mode_mask(DeformationModel model, const Twist& chi, const ReferenceStrain& ref) {
    auto mask = mode_mask(model);
    Vec6 out = chi.vector();
    Vec6 base = ref.value.vector();
    for (int i = 0; i < 6; ++i)
        if (!mask[static_cast<std::size_t>(i)]) out[i] = base[i];
    return Twist(out);
}

double strain_energy_density(const Vec3& kappa, const Vec3& kappa_bar, const Mat3& k_bt) {
    Vec3 d = kappa - kappa_bar;
    return 0.5 * d.dot(k_bt * d);
}

Twist gravity_load(const RodProperties& props) {
    if (props.density <= 0.0 || props.gravity.isZero()) return Twist::Zero();
    double scale = std::pow(props.length, 3) * props.density * props.area();
    // Minus sign: W is the term in Lambda' = ad^T Lambda + W for the internal
    // stress, which accumulates the applied load with opposite sign.
    return Twist(Vec3::Zero(), -scale * props.gravity);
}

Pose constant_curvature_pose(const Vec3& kappa, double tau) {
    double theta = kappa.norm();
    Mat3 r = exp_so3(tau * kappa);
    if (theta < 1e-12) return Pose(r, Vec3(tau, 0.0, 0.0));
    Vec3 axis = kappa / theta;
    Vec3 e1 = Vec3::UnitX();
    Vec3 par = axis.dot(e1) * axis;
    Vec3 perp = e1 - par;
    Vec3 pos = tau * par + std::sin(theta * tau) / theta * perp +
               (1.0 - std::cos(theta * tau)) / theta * axis.cross(e1);
    return Pose(r, pos);
}

}  // namespace rodbench
