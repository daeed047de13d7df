#include "rodbench/interp3.hpp"

#include <cmath>

#include "rodbench/lie.hpp"

namespace rodbench {

namespace {

// Third blending coefficient applies to m1 = dexpinv_{-x1} kappa1, so the
// interpolant is linear in (x1, kappa0, m1).
struct Blend {
    double b1, b2, b3;
};

Blend blend(double tau) {
    return {(3.0 - 2.0 * tau) * tau * tau, tau * (tau - 1.0) * (tau - 1.0),
            (tau - 1.0) * tau * tau};
}

Blend dblend(double tau) {
    return {6.0 * tau * (1.0 - tau), (3.0 * tau - 1.0) * (tau - 1.0), tau * (3.0 * tau - 2.0)};
}

Vec3 tip_slope_term(const InterpParams& p) {
    return dexpinv_so3(Vec3(-p.x1)) * p.kappa1;
}

}  // namespace

Vec3 interp_x(double tau, const InterpParams& p) {
    Blend b = blend(tau);
    return b.b1 * p.x1 + b.b2 * p.kappa0 + b.b3 * tip_slope_term(p);
}

Vec3 interp_dx(double tau, const InterpParams& p) {
    Blend b = dblend(tau);
    return b.b1 * p.x1 + b.b2 * p.kappa0 + b.b3 * tip_slope_term(p);
}

Vec3 interp_kappa(double tau, const InterpParams& p) {
    Vec3 m1 = tip_slope_term(p);
    Blend b = blend(tau);
    Blend db = dblend(tau);
    Vec3 x = b.b1 * p.x1 + b.b2 * p.kappa0 + b.b3 * m1;
    Vec3 dx = db.b1 * p.x1 + db.b2 * p.kappa0 + db.b3 * m1;
    return dexp_so3(Vec3(-x)) * dx;
}

Vec3 interp_position(double tau, const InterpParams& p, int quad_order, int panels) {
    if (quad_order < 3) throw DimensionMismatch("position quadrature needs order >= 3");
    if (tau == 0.0) return Vec3::Zero();
    Vec3 m1 = tip_slope_term(p);
    GaussRule rule = gauss_legendre(quad_order);
    return composite_gauss(rule, 0.0, tau, panels, Vec3(Vec3::Zero()), [&](double s) {
        Blend b = blend(s);
        Vec3 x = b.b1 * p.x1 + b.b2 * p.kappa0 + b.b3 * m1;
        return Vec3(exp_so3(x).col(0));
    });
}

double interp_energy(const InterpParams& p, const Mat3& k_bt, const Vec3& kappa_bar,
                     int quad_order, int panels) {
    if (quad_order < 3) throw DimensionMismatch("energy quadrature needs order >= 3");
    Vec3 m1 = tip_slope_term(p);
    GaussRule rule = gauss_legendre(quad_order);
    return composite_gauss(rule, 0.0, 1.0, panels, 0.0, [&](double s) {
        Blend b = blend(s);
        Blend db = dblend(s);
        Vec3 x = b.b1 * p.x1 + b.b2 * p.kappa0 + b.b3 * m1;
        Vec3 dx = db.b1 * p.x1 + db.b2 * p.kappa0 + db.b3 * m1;
        Vec3 kappa = dexp_so3(Vec3(-x)) * dx;
        return strain_energy_density(kappa, kappa_bar, k_bt);
    });
}

namespace {

using Vec9 = Eigen::Matrix<double, 9, 1>;
using Mat9 = Eigen::Matrix<double, 9, 9>;

struct Problem {
    Vec3 r_des;
    Mat3 k_bt;
    InterpOptions opt;

    Vec3 constraint(const InterpParams& p) const {
        return interp_position(1.0, p, opt.quad_order, opt.panels) - r_des;
    }

    double lagrangian(const InterpParams& p, const Vec3& lambda) const {
        return interp_energy(p, k_bt, Vec3::Zero(), opt.quad_order, opt.panels) +
               lambda.dot(constraint(p));
    }

    Vec9 residual(const InterpParams& p, const Vec3& lambda) const {
        Vec9 f;
        double h = opt.fd_step;
        for (int i = 0; i < 6; ++i) {
            InterpParams lo = p, hi = p;
            double* dlo = i < 3 ? lo.kappa0.data() : lo.kappa1.data();
            double* dhi = i < 3 ? hi.kappa0.data() : hi.kappa1.data();
            dlo[i % 3] -= h;
            dhi[i % 3] += h;
            f[i] = (lagrangian(hi, lambda) - lagrangian(lo, lambda)) / (2.0 * h);
        }
        f.tail<3>() = constraint(p);
        return f;
    }
};

InterpParams unpack(const InterpParams& base, const Eigen::Matrix<double, 6, 1>& k) {
    return {k.head<3>(), k.tail<3>(), base.x1};
}

struct NewtonOutcome {
    InterpParams params;
    Vec3 lambda;
    Vec9 residual;
    int iterations = 0;
    bool converged = false;
};

NewtonOutcome kkt_newton(const Problem& prob, InterpParams params, Vec3 lambda) {
    const InterpOptions& opt = prob.opt;
    NewtonOutcome out;
    Vec9 f = prob.residual(params, lambda);
    double mu = opt.damping0;

    int iter = 0;
    for (; iter < opt.max_iter; ++iter) {
        // converge well below tol (the energy Hessian is EI-scaled, so the
        // curvature error is ~30x the KKT residual for these rods)
        if (f.cwiseAbs().maxCoeff() <= opt.polish_tol) break;

        // Forward-difference Jacobian of the KKT residual.
        Mat9 jac;
        Vec9 z;
        z << params.kappa0, params.kappa1, lambda;
        for (int j = 0; j < 9; ++j) {
            double dz = 1e-5 * std::max(1.0, std::abs(z[j]));
            Vec9 zp = z;
            zp[j] += dz;
            Vec9 fp = prob.residual(unpack(params, zp.head<6>()), zp.tail<3>());
            jac.col(j) = (fp - f) / dz;
        }

        bool accepted = false;
        for (int k = 0; k < 25 && !accepted; ++k) {
            Mat9 damped = jac + mu * Mat9::Identity();
            Vec9 step = damped.colPivHouseholderQr().solve(Vec9(-f));
            if (step.allFinite()) {
                Vec9 zt = z + step;
                InterpParams pt = unpack(params, zt.head<6>());
                Vec3 lt = zt.tail<3>();
                Vec9 ft = prob.residual(pt, lt);
                if (ft.norm() < f.norm() * (1.0 - 1e-4) ||
                    ft.cwiseAbs().maxCoeff() <= opt.polish_tol) {
                    params = pt;
                    lambda = lt;
                    f = ft;
                    mu = std::max(mu * 0.1, opt.damping0);
                    accepted = true;
                    break;
                }
            }
            mu *= 10.0;
        }
        if (!accepted) break;  // stalled, usually at the FD noise floor
    }

    out.params = params;
    out.lambda = lambda;
    out.residual = f;
    out.iterations = iter;
    out.converged = f.cwiseAbs().maxCoeff() <= opt.tol;
    return out;
}

RodShape sample_shape(const InterpParams& p, const InterpOptions& opt, double length_m) {
    RodShape shape;
    shape.length_m = length_m;
    int n = opt.grid_steps;
    shape.tau.resize(static_cast<std::size_t>(n) + 1);
    shape.poses.resize(shape.tau.size());
    shape.strains.resize(shape.tau.size());
    GaussRule rule = gauss_legendre(opt.quad_order);
    Vec3 r = Vec3::Zero();
    double h = 1.0 / n;
    for (int i = 0; i <= n; ++i) {
        double tau = (i == n) ? 1.0 : i * h;
        shape.tau[static_cast<std::size_t>(i)] = tau;
        shape.poses[static_cast<std::size_t>(i)] = Pose(exp_so3(interp_x(tau, p)), r);
        shape.strains[static_cast<std::size_t>(i)] = Twist(interp_kappa(tau, p), Vec3::UnitX());
        if (i < n)
            r = composite_gauss(rule, tau, tau + h, 1, r, [&](double s) {
                return Vec3(exp_so3(interp_x(s, p)).col(0));
            });
    }
    return shape;
}

}  // namespace

Eigen::Matrix<double, 9, 1> interp_kkt_residual(const InterpParams& p, const Vec3& lambda,
                                                const Vec3& r_des, const Mat3& k_bt,
                                                const InterpOptions& opt) {
    Problem prob{r_des, k_bt, opt};
    return prob.residual(p, lambda);
}

InterpSolution solve_interp(const BoundaryConditions& bc, const RodProperties& props,
                            const std::optional<InterpParams>& guess,
                            const InterpOptions& options) {
    props.validate();
    StiffnessMatrix stiffness = build_stiffness(props);

    const Vec3* hint = bc.rotation_hint ? &*bc.rotation_hint : nullptr;
    Vec3 x1 = log_so3(bc.tip.rotation, hint);
    if (guess && guess->x1.norm() > 1e-12) {
        // A warm start carries its own winding branch; follow it instead of
        // snapping back to the principal logarithm.
        Vec3 prev = guess->x1;
        x1 = log_so3(bc.tip.rotation, &prev);
        double theta = x1.norm();
        if (theta > 1e-9) {
            Vec3 axis = x1 / theta;
            double turns = std::round((prev.dot(axis) - theta) / (2.0 * M_PI));
            x1 = (theta + 2.0 * M_PI * turns) * axis;
        }
    }
    if (x1.norm() >= 2.0 * M_PI - kDexpinvGuard)
        throw BranchGuard("tip rotation outside the branch guard");

    Problem prob{bc.tip.position, stiffness.bending_torsion, options};

    InterpParams start;
    if (guess) {
        start = *guess;
        start.x1 = x1;
    } else {
        start = {x1, x1, x1};  // coaxial heuristic, exact on constant-curvature targets
    }

    NewtonOutcome out = kkt_newton(prob, start, Vec3::Zero());
    int total_iters = out.iterations;

    if (!out.converged && !guess.has_value() && options.allow_continuation) {
        for (int stages : {4, 8, 16}) {
            InterpParams s{};
            Vec3 lam = Vec3::Zero();
            bool ok = true;
            for (int j = 1; j <= stages; ++j) {
                Pose sub = continuation_bc(bc.tip, bc.rotation_hint,
                                           static_cast<double>(j) / stages);
                Vec3 sub_x1 = log_so3(sub.rotation, j == 1 ? hint : &s.x1);
                Problem sub_prob{sub.position, stiffness.bending_torsion, options};
                InterpParams sub_start = (j == 1) ? InterpParams{sub_x1, sub_x1, sub_x1}
                                                  : InterpParams{s.kappa0, s.kappa1, sub_x1};
                NewtonOutcome stage = kkt_newton(sub_prob, sub_start, lam);
                total_iters += stage.iterations;
                if (!stage.converged) {
                    ok = false;
                    break;
                }
                s = stage.params;
                lam = stage.lambda;
                if (j == stages) out = std::move(stage);
            }
            if (ok) break;
        }
    }

    InterpSolution sol;
    sol.params = out.params;
    sol.multiplier = out.lambda;
    sol.energy = interp_energy(out.params, stiffness.bending_torsion, Vec3::Zero(),
                               options.quad_order, options.panels);
    sol.shape = sample_shape(out.params, options, props.length);
    sol.shape.diag.iterations = total_iters;
    sol.shape.diag.residual_norm = out.residual.cwiseAbs().maxCoeff();
    sol.shape.diag.converged = out.converged;
    if (!out.converged)
        throw NoConvergence("interpolated-model KKT iteration did not converge",
                            sol.shape.diag);
    return sol;
}

}  // namespace rodbench
