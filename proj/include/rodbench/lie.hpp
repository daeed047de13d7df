#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "rodbench/errors.hpp"
#include "rodbench/types.hpp"

// SO(3)/SE(3) kernel. Twists are ordered angular-first; dexp denotes the
// differential of the exponential map, dexp_x = sum_i ad_x^i / (i+1)!.
// Body-frame kinematics therefore use dexp at the negated argument:
// H^-1 H' = (dexp_{-X} X')^.

namespace rodbench {

/// Half width of the guard band around the dexpinv singularities at
/// nonzero multiples of 2*pi.
inline constexpr double kDexpinvGuard = 1e-3;

/// Below this angle the trigonometric coefficients switch to their
/// truncated Taylor forms.
inline constexpr double kSmallAngle = 0.1;

inline Mat3 hat(const Vec3& v) {
    Mat3 m;
    m << 0.0, -v.z(), v.y(),
         v.z(), 0.0, -v.x(),
        -v.y(), v.x(), 0.0;
    return m;
}

inline Vec3 vee(const Mat3& m) {
    return Vec3(m(2, 1), m(0, 2), m(1, 0));
}

namespace detail {

// Coefficient helpers in t = theta^2; Taylor branches avoid cancellation.
inline double coef_sinc(double theta) {  // sin(t)/t
    double t = theta * theta;
    if (theta < kSmallAngle)
        return 1.0 - t / 6.0 + t * t / 120.0 - t * t * t / 5040.0;
    return std::sin(theta) / theta;
}

inline double coef_versin(double theta) {  // (1 - cos t)/t^2
    double t = theta * theta;
    if (theta < kSmallAngle)
        return 0.5 - t / 24.0 + t * t / 720.0 - t * t * t / 40320.0;
    return (1.0 - std::cos(theta)) / t;
}

inline double coef_c(double theta) {  // (t - sin t)/t^3
    double t = theta * theta;
    if (theta < kSmallAngle)
        return 1.0 / 6.0 - t / 120.0 + t * t / 5040.0 - t * t * t / 362880.0;
    return (theta - std::sin(theta)) / (t * theta);
}

inline double coef_dexpinv(double theta) {  // (1 - (t/2) cot(t/2))/t^2
    double t = theta * theta;
    if (theta < kSmallAngle)
        return 1.0 / 12.0 + t / 720.0 + t * t / 30240.0 + t * t * t / 1209600.0;
    return (1.0 - 0.5 * theta * std::cos(0.5 * theta) / std::sin(0.5 * theta)) / t;
}

inline double coef_q2(double theta) {  // (t^2/2 + cos t - 1)/t^4
    double t = theta * theta;
    if (theta < kSmallAngle)
        return 1.0 / 24.0 - t / 720.0 + t * t / 40320.0 - t * t * t / 3628800.0;
    return (0.5 * t + std::cos(theta) - 1.0) / (t * t);
}

inline double coef_q3(double theta) {  // (2t - 3 sin t + t cos t)/(2 t^5)
    double t = theta * theta;
    if (theta < kSmallAngle)
        return 1.0 / 120.0 - t / 2520.0 + t * t / 120960.0 - t * t * t / 9979200.0;
    return (2.0 * theta - 3.0 * std::sin(theta) + theta * std::cos(theta)) / (2.0 * t * t * theta);
}

inline void check_dexpinv_domain(double theta) {
    if (theta < M_PI) return;
    double k = std::round(theta / (2.0 * M_PI));
    if (k >= 1.0 && std::abs(theta - 2.0 * M_PI * k) < kDexpinvGuard)
        throw NearSingular("dexpinv argument within guard band of 2*pi*" +
                           std::to_string(static_cast<long>(k)));
}

}  // namespace detail

inline Mat3 exp_so3(const Vec3& x) {
    double theta = x.norm();
    Mat3 xh = hat(x);
    return Mat3::Identity() + detail::coef_sinc(theta) * xh +
           detail::coef_versin(theta) * (xh * xh);
}

inline Mat3 dexp_so3(const Vec3& x) {
    double theta = x.norm();
    Mat3 xh = hat(x);
    return Mat3::Identity() + detail::coef_versin(theta) * xh +
           detail::coef_c(theta) * (xh * xh);
}

inline Mat3 dexpinv_so3(const Vec3& x) {
    double theta = x.norm();
    detail::check_dexpinv_domain(theta);
    Mat3 xh = hat(x);
    return Mat3::Identity() - 0.5 * xh + detail::coef_dexpinv(theta) * (xh * xh);
}

/// Principal logarithm of a rotation matrix, |result| <= pi. At a half turn
/// the axis sign is ambiguous: it is chosen to align with `hint` when one is
/// given, otherwise so that the largest-magnitude component is positive.
inline Vec3 log_so3(const Mat3& R, const Vec3* hint = nullptr) {
    Eigen::Quaterniond q(R);
    q.normalize();
    Eigen::AngleAxisd aa(q);
    double theta = aa.angle();
    if (theta < 1e-14) return Vec3::Zero();
    Vec3 x = theta * aa.axis();
    if (theta > M_PI - 1e-6) {
        if (hint != nullptr && hint->norm() > 1e-12) {
            if (x.dot(*hint) < 0.0) x = -x;
        } else {
            int i;
            x.cwiseAbs().maxCoeff(&i);
            if (x[i] < 0.0) x = -x;
        }
    }
    return x;
}

inline Pose exp_se3(const Twist& X) {
    return Pose(exp_so3(X.angular), dexp_so3(X.angular) * X.linear);
}

inline Twist log_se3(const Pose& H, const Vec3* hint = nullptr) {
    Vec3 x = log_so3(H.rotation, hint);
    return Twist(x, dexpinv_so3(x) * H.position);
}

namespace detail {

// Coupling block of the se(3) dexp: the directional derivative of
// x -> dexp_so3(x) in direction y, in closed form.
inline Mat3 dexp_coupling(const Vec3& x, const Vec3& y) {
    double theta = x.norm();
    Mat3 xh = hat(x);
    Mat3 yh = hat(y);
    Mat3 xy = xh * yh;
    Mat3 yx = yh * xh;
    Mat3 xyx = xy * xh;
    return 0.5 * yh + coef_c(theta) * (xy + yx + xyx) +
           coef_q2(theta) * (xh * xy + yx * xh - 3.0 * xyx) +
           coef_q3(theta) * (xyx * xh + xh * xyx);
}

}  // namespace detail

inline Mat6 dexp_se3(const Twist& X) {
    Mat3 J = dexp_so3(X.angular);
    Mat3 Q = detail::dexp_coupling(X.angular, X.linear);
    Mat6 out = Mat6::Zero();
    out.topLeftCorner<3, 3>() = J;
    out.bottomRightCorner<3, 3>() = J;
    out.bottomLeftCorner<3, 3>() = Q;
    return out;
}

inline Mat6 dexpinv_se3(const Twist& X) {
    Mat3 Jinv = dexpinv_so3(X.angular);
    Mat3 Q = detail::dexp_coupling(X.angular, X.linear);
    Mat6 out = Mat6::Zero();
    out.topLeftCorner<3, 3>() = Jinv;
    out.bottomRightCorner<3, 3>() = Jinv;
    out.bottomLeftCorner<3, 3>() = -Jinv * Q * Jinv;
    return out;
}

inline Mat6 ad(const Twist& X) {
    Mat6 out = Mat6::Zero();
    Mat3 xh = hat(X.angular);
    out.topLeftCorner<3, 3>() = xh;
    out.bottomRightCorner<3, 3>() = xh;
    out.bottomLeftCorner<3, 3>() = hat(X.linear);
    return out;
}

inline Mat6 Ad(const Pose& H) {
    Mat6 out = Mat6::Zero();
    out.topLeftCorner<3, 3>() = H.rotation;
    out.bottomRightCorner<3, 3>() = H.rotation;
    out.bottomLeftCorner<3, 3>() = hat(H.position) * H.rotation;
    return out;
}

/// ad_X^T Lambda without forming the 6x6 matrix (hot path of the stress ODE).
inline Twist ad_transpose_apply(const Twist& chi, const Twist& lambda) {
    return Twist(-chi.angular.cross(lambda.angular) - chi.linear.cross(lambda.linear),
                 -chi.angular.cross(lambda.linear));
}

}  // namespace rodbench
