#include <doctest.h>

#include "oracles.hpp"
#include "rodbench/interp3.hpp"
#include "rodbench/lie.hpp"
#include "rodbench/metrics.hpp"

using namespace rodbench;

namespace {

RodProperties fibreglass_sim() {
    RodProperties p;
    p.length = 1.0;
    p.diameter = 2e-3;
    p.youngs = 36.5e9;
    p.shear = 3e9;
    return p;
}

InterpParams random_params(oracles::Rng& rng, double scale) {
    return {rng.ball(scale), rng.ball(scale), rng.ball(scale)};
}

}  // namespace

TEST_CASE("hermite endpoint conditions") {
    oracles::Rng rng(61);
    for (int i = 0; i < 100; ++i) {
        InterpParams p = random_params(rng, 2.5);
        CHECK(interp_x(0.0, p).norm() == 0.0);
        CHECK((interp_x(1.0, p) - p.x1).norm() < 1e-14);
        CHECK((interp_kappa(0.0, p) - p.kappa0).norm() < 1e-10);
        CHECK((interp_kappa(1.0, p) - p.kappa1).norm() < 1e-10);
    }
    // slope at zero equals kappa0 (finite differences)
    InterpParams p = random_params(rng, 2.0);
    double h = 1e-7;
    Vec3 fd = (interp_x(h, p) - interp_x(0.0, p)) / h;
    CHECK((fd - p.kappa0).norm() < 1e-6);
}

TEST_CASE("coaxial parameters collapse to the linear field") {
    Vec3 k(0, M_PI, 0);
    InterpParams p{k, k, k};
    for (double tau : {0.0, 0.1, 0.37, 0.5, 0.82, 1.0}) {
        CHECK((interp_x(tau, p) - tau * k).norm() < 1e-12);
        CHECK((interp_kappa(tau, p) - k).norm() < 1e-12);
    }
}

TEST_CASE("interp_position basics and quadrature convergence") {
    InterpParams zero;
    for (double tau : {0.0, 0.3, 1.0})
        CHECK((interp_position(tau, zero) - Vec3(tau, 0, 0)).norm() < 1e-14);

    Vec3 k(0, M_PI, 0);
    InterpParams arc{k, k, k};
    Pose oracle = oracles::constant_curvature_pose(k, 1.0);
    CHECK((interp_position(1.0, arc) - oracle.position).norm() < 1e-10);

    oracles::Rng rng(62);
    for (int i = 0; i < 20; ++i) {
        InterpParams p = random_params(rng, M_PI);
        Vec3 lo = interp_position(1.0, p, 5);
        Vec3 hi = interp_position(1.0, p, 10);
        CHECK((lo - hi).norm() < 1e-9);
    }
}

TEST_CASE("interp_energy value and invariance in the quadrature order") {
    StiffnessMatrix k = build_stiffness(fibreglass_sim());
    InterpParams zero;
    CHECK(interp_energy(zero, k.bending_torsion) == 0.0);

    Vec3 kap(0, M_PI, 0);
    InterpParams arc{kap, kap, kap};
    CHECK(interp_energy(arc, k.bending_torsion) == doctest::Approx(0.141483).epsilon(1e-4));

    oracles::Rng rng(63);
    for (int i = 0; i < 20; ++i) {
        InterpParams p = random_params(rng, M_PI);
        double a = interp_energy(p, k.bending_torsion, Vec3::Zero(), 5);
        double b = interp_energy(p, k.bending_torsion, Vec3::Zero(), 8);
        CHECK(std::abs(a - b) < 1e-9);
    }
}

TEST_CASE("kkt gradients agree with independent central differences") {
    StiffnessMatrix k = build_stiffness(fibreglass_sim());
    oracles::Rng rng(64);
    InterpOptions opt;
    int checked = 0;
    for (int i = 0; i < 100; ++i) {
        InterpParams p = random_params(rng, 2.0);
        Vec3 lambda = rng.vec3(0.05);
        Vec3 r_des = rng.vec3(0.3) + Vec3(0.4, 0, 0);
        auto f = interp_kkt_residual(p, lambda, r_des, k.bending_torsion, opt);

        // same stationarity block via a clearly different step size
        double h = 2e-5;
        for (int j = 0; j < 6; ++j) {
            InterpParams lo = p, hi = p;
            (j < 3 ? lo.kappa0 : lo.kappa1)[j % 3] -= h;
            (j < 3 ? hi.kappa0 : hi.kappa1)[j % 3] += h;
            double vlo = interp_energy(lo, k.bending_torsion) +
                         lambda.dot(interp_position(1.0, lo) - r_des);
            double vhi = interp_energy(hi, k.bending_torsion) +
                         lambda.dot(interp_position(1.0, hi) - r_des);
            double ref = (vhi - vlo) / (2.0 * h);
            double denom = std::max(1e-3, std::abs(ref));
            CHECK(std::abs(f[j] - ref) / denom <= 1e-5);
            ++checked;
        }
    }
    CHECK(checked == 600);
}

TEST_CASE("straight bc solves to zero curvature and zero energy") {
    BoundaryConditions bc;
    bc.tip = Pose(Mat3::Identity(), Vec3::UnitX());
    InterpSolution sol = solve_interp(bc, fibreglass_sim());
    CHECK(sol.params.kappa0.norm() < 1e-7);
    CHECK(sol.params.kappa1.norm() < 1e-7);
    CHECK(sol.energy < 1e-12);
}

TEST_CASE("uniform bending is recovered exactly") {
    Vec3 k(0, M_PI, 0);
    BoundaryConditions bc;
    bc.tip = constant_curvature_pose(k, 1.0);
    bc.rotation_hint = k;
    InterpSolution sol = solve_interp(bc, fibreglass_sim());
    CHECK((sol.params.kappa0 - k).norm() < 1e-6);
    CHECK((sol.params.kappa1 - k).norm() < 1e-6);
    for (double tau : {0.25, 0.5, 0.75})
        CHECK((interp_kappa(tau, sol.params) - k).norm() < 1e-6);
}

TEST_CASE("pure torsion matches the exact solver") {
    Vec3 k(M_PI, 0, 0);
    BoundaryConditions bc;
    bc.tip = Pose(exp_so3(k), Vec3::UnitX());
    bc.rotation_hint = k;
    RodProperties props = fibreglass_sim();

    InterpSolution approx = solve_interp(bc, props);
    ExactSolution exact = solve_exact_bvp(bc, props);
    ErrorCurve curve = pose_error_curve(approx.shape, exact.shape);
    ErrorSummary s = summarize(curve, props.length);
    CHECK(s.e_r_max_pct < 0.01);
}

TEST_CASE("constant-curvature family is solved to the exact field") {
    oracles::Rng rng(65);
    RodProperties props = fibreglass_sim();
    for (int i = 0; i < 5; ++i) {
        Vec3 k = rng.ball(2.8);
        BoundaryConditions bc{constant_curvature_pose(k, 1.0), k};
        InterpSolution sol = solve_interp(bc, props);
        for (double tau : {0.2, 0.5, 0.9})
            CHECK((interp_kappa(tau, sol.params) - k).norm() < 1e-8);
    }
}

TEST_CASE("frame equivariance under rotations about the base tangent") {
    RodProperties props = fibreglass_sim();
    Vec3 k(0.4, 1.9, -0.2);
    BoundaryConditions bc{constant_curvature_pose(k, 1.0), k};
    InterpSolution base = solve_interp(bc, props);

    Mat3 q = exp_so3(Vec3(0.83, 0, 0));
    BoundaryConditions rotated;
    rotated.tip = Pose(q * bc.tip.rotation * q.transpose(), q * bc.tip.position);
    rotated.rotation_hint = q * k;
    InterpSolution rot = solve_interp(rotated, props);

    for (std::size_t i = 0; i < base.shape.size(); i += 20)
        CHECK((rot.shape.poses[i].position - q * base.shape.poses[i].position).norm() < 1e-8);
}

TEST_CASE("solution energy stays within 5% of the exact shape energy") {
    RodProperties props = fibreglass_sim();
    StiffnessMatrix st = build_stiffness(props);
    // mid-trajectory bending configurations
    for (double kap : {M_PI / 3, 2 * M_PI / 3, M_PI}) {
        Vec3 k(0, kap, 0);
        BoundaryConditions bc{constant_curvature_pose(k, 1.0), k};
        InterpSolution sol = solve_interp(bc, props);
        ExactSolution exact = solve_exact_bvp(bc, props);
        // energy of the exact strain field through the same quadrature
        double exact_energy = 0.0;
        int steps = static_cast<int>(exact.shape.size()) - 1;
        for (int i = 0; i <= steps; ++i) {
            double w = (i == 0 || i == steps) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
            exact_energy += w / (3.0 * steps) *
                            strain_energy_density(exact.shape.strains[static_cast<std::size_t>(i)].angular,
                                                  Vec3::Zero(), st.bending_torsion);
        }
        CHECK(sol.energy <= 1.05 * exact_energy + 1e-12);
    }
}

TEST_CASE("branch guard rejects out-of-range tip rotations") {
    BoundaryConditions bc;
    bc.tip = Pose(exp_so3(Vec3(0, 1.0, 0)), Vec3(0.8, 0, -0.3));
    bc.rotation_hint = Vec3(0, 2.0 * M_PI - 1e-4, 0);  // forces the bad branch
    InterpParams guess;
    guess.x1 = Vec3(0, 2.0 * M_PI - 1e-4, 0);
    CHECK_THROWS_AS(solve_interp(bc, fibreglass_sim(), guess), BranchGuard);
}
