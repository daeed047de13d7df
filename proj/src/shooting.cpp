#include "rodbench/shooting.hpp"

#include <cmath>
#include <limits>

#include "rodbench/lie.hpp"

namespace rodbench {

Vec6 boundary_residual(const Pose& tip, const Pose& desired) {
    Vec6 res;
    res.head<3>() = tip.position - desired.position;
    Mat3 q = desired.rotation.transpose() * tip.rotation;
    res.tail<3>() = vee(Mat3(q - q.transpose()));
    return res;
}

namespace {

struct NewtonOutcome {
    ShootingState state;
    RodShape shape;
    Vec6 residual = Vec6::Constant(std::numeric_limits<double>::infinity());
    int iterations = 0;
    bool converged = false;
};

RodShape integrate(const ShootingState& s, const RodProperties& props,
                   const StiffnessMatrix& stiffness, const Twist& load,
                   const ExactOptions& opt) {
    if (load.angular.isZero() && load.linear.isZero())
        return integrate_kirchhoff_ivp(s.kappa0, s.base_force, stiffness, opt.steps,
                                       props.length);
    // With a distributed load the base-frame constraint force is no longer
    // constant; integrate the full constrained Cosserat system instead.
    Twist lambda0(stiffness.bending_torsion * s.kappa0, s.base_force);
    return integrate_cosserat_ivp(DeformationModel::InextensibleKirchhoff, ReferenceStrain{},
                                  stiffness, props.length, load, lambda0, opt.steps);
}

NewtonOutcome newton(const BoundaryConditions& bc, const RodProperties& props,
                     const StiffnessMatrix& stiffness, const Twist& load,
                     ShootingState state, const ExactOptions& opt) {
    NewtonOutcome out;
    out.state = state;
    RodShape shape;
    try {
        shape = integrate(state, props, stiffness, load, opt);
    } catch (const IntegrationDiverged&) {
        return out;  // nothing to iterate from
    }
    Vec6 res = boundary_residual(shape.poses.back(), bc.tip);

    int iter = 0;
    for (; iter < opt.max_iter; ++iter) {
        if (res.cwiseAbs().maxCoeff() <= 0.5 * opt.tol) break;

        Mat6 jac;
        Vec6 u = state.vector();
        bool jac_ok = true;
        for (int j = 0; j < 6; ++j) {
            Vec6 up = u;
            up[j] += opt.fd_step;
            try {
                RodShape sp =
                    integrate(ShootingState::from_vector(up), props, stiffness, load, opt);
                jac.col(j) = (boundary_residual(sp.poses.back(), bc.tip) - res) / opt.fd_step;
            } catch (const IntegrationDiverged&) {
                jac_ok = false;
                break;
            }
        }
        if (!jac_ok) break;

        // Minimum-norm solve: at straight configurations the axial force is
        // indeterminate and the Jacobian is rank deficient along it.
        Eigen::CompleteOrthogonalDecomposition<Mat6> cod(jac);
        cod.setThreshold(1e-8);
        Vec6 step = cod.solve(Vec6(-res));
        if (!step.allFinite()) break;
        double cap = 2.0 + 0.5 * u.norm();
        if (step.norm() > cap) step *= cap / step.norm();

        double alpha = 1.0;
        RodShape best_shape;
        Vec6 best_res;
        bool accepted = false;
        for (int k = 0; k <= opt.max_backtracks; ++k) {
            ShootingState trial = ShootingState::from_vector(Vec6(u + alpha * step));
            RodShape ts;
            try {
                ts = integrate(trial, props, stiffness, load, opt);
            } catch (const IntegrationDiverged&) {
                alpha *= 0.5;
                continue;
            }
            Vec6 tr = boundary_residual(ts.poses.back(), bc.tip);
            if (tr.norm() < res.norm() || k == opt.max_backtracks) {
                state = trial;
                best_shape = std::move(ts);
                best_res = tr;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) break;  // every trial diverged
        shape = std::move(best_shape);
        res = best_res;
    }

    out.state = state;
    out.shape = std::move(shape);
    out.residual = res;
    out.iterations = iter;
    out.converged = res.cwiseAbs().maxCoeff() <= opt.tol;
    return out;
}

}  // namespace

Pose continuation_bc(const Pose& target, const std::optional<Vec3>& hint, double t) {
    const Vec3* h = hint ? &*hint : nullptr;
    Vec3 x_rel = log_so3(target.rotation, h);
    Pose arc = constant_curvature_pose(t * x_rel, 1.0);
    return Pose(arc.rotation, (1.0 - t) * arc.position + t * target.position);
}

ExactSolution solve_exact_bvp(const BoundaryConditions& bc, const RodProperties& props,
                              const Twist& load, const std::optional<ShootingState>& guess,
                              const ExactOptions& options) {
    props.validate();
    StiffnessMatrix stiffness = build_stiffness(props);

    ShootingState start;
    if (guess) {
        start = *guess;
    } else {
        // Coaxial seed: exact for constant-curvature targets and keeps the
        // iteration on the minimum-energy branch nearby.
        const Vec3* hint = bc.rotation_hint ? &*bc.rotation_hint : nullptr;
        start.kappa0 = log_so3(bc.tip.rotation, hint);
    }
    NewtonOutcome out = newton(bc, props, stiffness, load, start, options);
    int total_iters = out.iterations;

    if (!out.converged && !guess.has_value() && options.allow_continuation) {
        // Homotopy along the bc geodesic from the straight configuration.
        for (int stages : {4, 8, 16, 32}) {
            ShootingState s{};
            bool ok = true;
            for (int j = 1; j <= stages; ++j) {
                BoundaryConditions sub{continuation_bc(bc.tip, bc.rotation_hint,
                                                       static_cast<double>(j) / stages),
                                       bc.rotation_hint};
                NewtonOutcome stage = newton(sub, props, stiffness, load, s, options);
                total_iters += stage.iterations;
                if (!stage.converged) {
                    ok = false;
                    break;
                }
                s = stage.state;
                if (j == stages) out = std::move(stage);
            }
            if (ok) break;
        }
    }

    ExactSolution sol;
    sol.shape = std::move(out.shape);
    sol.state = out.state;
    sol.residual = out.residual;
    sol.shape.diag.iterations = total_iters;
    sol.shape.diag.residual_norm = out.residual.cwiseAbs().maxCoeff();
    sol.shape.diag.converged = out.converged;
    if (!out.converged)
        throw NoConvergence("exact BVP shooting did not converge", sol.shape.diag);
    return sol;
}

}  // namespace rodbench
