#pragma once

#include <Eigen/Core>
#include <vector>

namespace rodbench {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

/// Element of se(3) in vector form, ordered angular-first.
/// Also used for co-vectors (stresses, distributed wrenches); the pairing
/// with twists is the plain dot product in body coordinates.
struct Twist {
    Vec3 angular = Vec3::Zero();
    Vec3 linear = Vec3::Zero();

    Twist() = default;
    Twist(const Vec3& ang, const Vec3& lin) : angular(ang), linear(lin) {}
    explicit Twist(const Vec6& v) : angular(v.head<3>()), linear(v.tail<3>()) {}

    Vec6 vector() const {
        Vec6 v;
        v << angular, linear;
        return v;
    }

    static Twist Zero() { return Twist(); }

    Twist operator+(const Twist& o) const { return {angular + o.angular, linear + o.linear}; }
    Twist operator-(const Twist& o) const { return {angular - o.angular, linear - o.linear}; }
    Twist operator*(double s) const { return {angular * s, linear * s}; }
    Twist operator-() const { return {-angular, -linear}; }
};

inline Twist operator*(double s, const Twist& t) { return t * s; }

/// Element of SE(3): rotation matrix plus position.
struct Pose {
    Mat3 rotation = Mat3::Identity();
    Vec3 position = Vec3::Zero();

    Pose() = default;
    Pose(const Mat3& R, const Vec3& r) : rotation(R), position(r) {}

    static Pose Identity() { return Pose(); }

    Pose operator*(const Pose& o) const {
        return {rotation * o.rotation, rotation * o.position + position};
    }

    Pose inverse() const {
        Mat3 Rt = rotation.transpose();
        return {Rt, -(Rt * position)};
    }

    /// Deviation from orthonormality, max of |R'R - I| and |det R - 1|.
    double orthonormality_defect() const {
        double d = (rotation.transpose() * rotation - Mat3::Identity()).cwiseAbs().maxCoeff();
        return std::max(d, std::abs(rotation.determinant() - 1.0));
    }
};

/// Per-solve bookkeeping shared by all solvers.
struct SolveDiagnostics {
    int iterations = 0;
    double wall_time_s = 0.0;
    double residual_norm = 0.0;
    bool converged = false;
};

/// Sampled solution field tau_i -> (pose, strain). Positions are stored in
/// units of the rod length (tau-normalised); `length_m` converts to meters.
struct RodShape {
    std::vector<double> tau;
    std::vector<Pose> poses;
    std::vector<Twist> strains;
    double length_m = 1.0;
    SolveDiagnostics diag;

    std::size_t size() const { return tau.size(); }
};

}  // namespace rodbench
