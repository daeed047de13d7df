#pragma once

#include <chrono>
#include <exception>
#include <optional>
#include <string>
#include <vector>

#include "rodbench/errors.hpp"
#include "rodbench/types.hpp"

namespace rodbench {

/// Cross-sectional pose error samples; e_r in meters, e_x dimensionless
/// (half trace defect, in [0,2]).
struct ErrorCurve {
    std::vector<double> tau;
    std::vector<double> e_r;
    std::vector<double> e_x;
    std::string model_id;
    std::string reference_id;
};

struct ErrorSummary {
    double e_r_int = 0.0;   // m
    double e_x_int = 0.0;
    double e_r_max = 0.0;   // m
    double e_x_max = 0.0;
    double e_r_int_pct = 0.0;  // percent of L
    double e_r_max_pct = 0.0;
};

/// Discrete measurement points along the rod (meters, base frame).
struct MarkerSet {
    std::vector<double> tau;
    std::vector<Vec3> points;
};

struct MarkerErrors {
    std::vector<double> per_marker;  // m
    double sum = 0.0;
    double mean = 0.0;
};

/// Pose of a shape at an arbitrary tau, geodesically interpolated between
/// the neighbouring samples.
Pose sample_pose(const RodShape& shape, double tau);

/// Pose error of a model shape against a reference shape, evaluated on the
/// model grid (the reference is resampled geodesically).
ErrorCurve pose_error_curve(const RodShape& model, const RodShape& reference);

ErrorSummary summarize(const ErrorCurve& curve, double length);

MarkerErrors marker_error(const RodShape& model, const MarkerSet& markers);

/// Max deviation of the centreline speed from 1, via 4th-order difference
/// stencils on the sampled positions.
double unit_speed_max_deviation(const RodShape& shape);

template <class T>
struct Timed {
    std::optional<T> value;
    std::exception_ptr error;
    double wall_time_s = 0.0;
    int iterations = -1;
};

/// Run a solver callable under a monotonic clock. Solver failures are
/// captured (with their diagnostics) rather than thrown, so the elapsed
/// time is reported either way.
template <class F>
auto timed_solve(F&& solver) -> Timed<decltype(solver())> {
    Timed<decltype(solver())> out;
    auto t0 = std::chrono::steady_clock::now();
    try {
        out.value = solver();
        out.iterations = out.value->diagnostics().iterations;
    } catch (const NoConvergence& e) {
        out.error = std::current_exception();
        out.iterations = e.diag.iterations;
    } catch (...) {
        out.error = std::current_exception();
    }
    auto t1 = std::chrono::steady_clock::now();
    out.wall_time_s = std::chrono::duration<double>(t1 - t0).count();
    return out;
}

}  // namespace rodbench
