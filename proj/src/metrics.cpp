#include "rodbench/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "rodbench/lie.hpp"

namespace rodbench {

Pose sample_pose(const RodShape& shape, double tau) {
    if (shape.size() < 2) throw GridMismatch("shape needs at least 2 samples");
    if (tau < shape.tau.front() - 1e-12 || tau > shape.tau.back() + 1e-12)
        throw GridMismatch("tau outside the sampled range");
    auto it = std::upper_bound(shape.tau.begin(), shape.tau.end(), tau);
    std::size_t hi = std::min<std::size_t>(
        shape.tau.size() - 1,
        std::max<std::size_t>(1, static_cast<std::size_t>(it - shape.tau.begin())));
    std::size_t lo = hi - 1;
    double span = shape.tau[hi] - shape.tau[lo];
    double u = span > 0.0 ? (tau - shape.tau[lo]) / span : 0.0;
    if (u <= 0.0) return shape.poses[lo];
    if (u >= 1.0) return shape.poses[hi];
    Twist rel = log_se3(shape.poses[lo].inverse() * shape.poses[hi]);
    return shape.poses[lo] * exp_se3(rel * u);
}

ErrorCurve pose_error_curve(const RodShape& model, const RodShape& reference) {
    if (model.size() < 2 || reference.size() < 2)
        throw GridMismatch("pose error needs at least 2 samples per shape");
    ErrorCurve curve;
    curve.tau = model.tau;
    curve.e_r.resize(model.size());
    curve.e_x.resize(model.size());
    double scale = model.length_m;
    for (std::size_t i = 0; i < model.size(); ++i) {
        Pose ref = sample_pose(reference, model.tau[i]);
        curve.e_r[i] = scale * (model.poses[i].position - ref.position).norm();
        Mat3 rel = ref.rotation.transpose() * model.poses[i].rotation;
        curve.e_x[i] = 0.5 * (Mat3::Identity() - rel).trace();
    }
    return curve;
}

ErrorSummary summarize(const ErrorCurve& curve, double length) {
    if (curve.tau.empty()) throw GridMismatch("empty error curve");
    ErrorSummary s;
    for (std::size_t i = 0; i < curve.tau.size(); ++i) {
        s.e_r_max = std::max(s.e_r_max, curve.e_r[i]);
        s.e_x_max = std::max(s.e_x_max, curve.e_x[i]);
        if (i + 1 < curve.tau.size()) {
            double h = curve.tau[i + 1] - curve.tau[i];
            s.e_r_int += 0.5 * h * (curve.e_r[i] + curve.e_r[i + 1]);
            s.e_x_int += 0.5 * h * (curve.e_x[i] + curve.e_x[i + 1]);
        }
    }
    s.e_r_int_pct = 100.0 * s.e_r_int / length;
    s.e_r_max_pct = 100.0 * s.e_r_max / length;
    return s;
}

MarkerErrors marker_error(const RodShape& model, const MarkerSet& markers) {
    MarkerErrors out;
    out.per_marker.reserve(markers.tau.size());
    for (std::size_t i = 0; i < markers.tau.size(); ++i) {
        Pose p = sample_pose(model, markers.tau[i]);  // GridMismatch if out of range
        double e = (model.length_m * p.position - markers.points[i]).norm();
        out.per_marker.push_back(e);
        out.sum += e;
    }
    out.mean = out.per_marker.empty() ? 0.0 : out.sum / out.per_marker.size();
    return out;
}

double unit_speed_max_deviation(const RodShape& shape) {
    std::size_t n = shape.size();
    if (n < 5) throw GridMismatch("unit-speed check needs at least 5 samples");
    double h = shape.tau[1] - shape.tau[0];
    auto r = [&](std::size_t i) { return shape.poses[i].position; };
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        Vec3 d;
        if (i >= 2 && i + 2 < n) {
            d = (r(i - 2) - 8.0 * r(i - 1) + 8.0 * r(i + 1) - r(i + 2)) / (12.0 * h);
        } else if (i < 2) {
            d = (-25.0 * r(i) + 48.0 * r(i + 1) - 36.0 * r(i + 2) + 16.0 * r(i + 3) -
                 3.0 * r(i + 4)) /
                (12.0 * h);
        } else {
            d = (25.0 * r(i) - 48.0 * r(i - 1) + 36.0 * r(i - 2) - 16.0 * r(i - 3) +
                 3.0 * r(i - 4)) /
                (12.0 * h);
        }
        worst = std::max(worst, std::abs(d.norm() - 1.0));
    }
    return worst;
}

}  // namespace rodbench
