#include "rodbench/gvs.hpp"

#include <cmath>
#include <numeric>

#include "rodbench/lie.hpp"
#include "rodbench/quadrature.hpp"

namespace rodbench {

namespace {
constexpr int kMaxFunctions = 32;
}

int ShapeBasis::total() const {
    return std::accumulate(functions_per_mode.begin(), functions_per_mode.end(), 0);
}

int ShapeBasis::max_functions() const {
    int m = 0;
    for (int n : functions_per_mode) m = std::max(m, n);
    return m;
}

void ShapeBasis::eval_mode(int n, double tau, double* out) const {
    if (kind == BasisKind::Monomial) {
        double v = 1.0;
        for (int j = 0; j < n; ++j) {
            out[j] = v;
            v *= tau;
        }
        return;
    }
    // Legendre shifted to [0,1]: (j+1) P_{j+1} = (2j+1)(2 tau - 1) P_j - j P_{j-1}
    double u = 2.0 * tau - 1.0;
    for (int j = 0; j < n; ++j) {
        if (j == 0)
            out[j] = 1.0;
        else if (j == 1)
            out[j] = u;
        else
            out[j] = ((2.0 * j - 1.0) * u * out[j - 1] - (j - 1.0) * out[j - 2]) / j;
    }
}

ShapeBasis make_basis(BasisKind kind, int functions, DeformationModel model) {
    if (functions < 1 || functions > kMaxFunctions)
        throw DimensionMismatch("basis function count out of range");
    ShapeBasis b;
    b.kind = kind;
    b.functions_per_mode.assign(enabled_modes(model).size(), functions);
    return b;
}

std::vector<int> enabled_modes(DeformationModel model) {
    std::vector<int> idx;
    auto mask = mode_mask(model);
    for (int i = 0; i < 6; ++i)
        if (mask[static_cast<std::size_t>(i)]) idx.push_back(i);
    return idx;
}

namespace {

struct BasisLayout {
    std::vector<int> modes;    // strain component per block
    std::vector<int> offsets;  // q offset per block
    int dim = 0;

    BasisLayout(const ShapeBasis& basis, DeformationModel model) {
        modes = enabled_modes(model);
        if (modes.size() != basis.functions_per_mode.size())
            throw DimensionMismatch("basis block count does not match enabled modes");
        offsets.resize(modes.size());
        for (std::size_t m = 0; m < modes.size(); ++m) {
            offsets[m] = dim;
            dim += basis.functions_per_mode[m];
        }
    }
};

// chi(tau) without heap traffic; `vals` is scratch of max_functions doubles.
Twist strain_at(double tau, const ShapeBasis& basis, const BasisLayout& layout,
                const Eigen::VectorXd& q, const Vec6& chi_bar, double* vals) {
    Vec6 chi = chi_bar;
    for (std::size_t m = 0; m < layout.modes.size(); ++m) {
        int n = basis.functions_per_mode[m];
        basis.eval_mode(n, tau, vals);
        double acc = 0.0;
        for (int j = 0; j < n; ++j) acc += vals[j] * q[layout.offsets[m] + j];
        chi[layout.modes[m]] += acc;
    }
    return Twist(chi);
}

// Accumulates w * Phi(tau)' B' lambda into out.
void accumulate_projection(double w, double tau, const ShapeBasis& basis,
                           const BasisLayout& layout, const Vec6& lambda,
                           Eigen::VectorXd& out, double* vals) {
    for (std::size_t m = 0; m < layout.modes.size(); ++m) {
        int n = basis.functions_per_mode[m];
        basis.eval_mode(n, tau, vals);
        double l = lambda[layout.modes[m]];
        for (int j = 0; j < n; ++j) out[layout.offsets[m] + j] += w * vals[j] * l;
    }
}

}  // namespace

Twist gvs_strain(double tau, const ShapeBasis& basis, DeformationModel model,
                 const Eigen::VectorXd& q, const ReferenceStrain& reference) {
    BasisLayout layout(basis, model);
    if (q.size() != layout.dim) throw DimensionMismatch("q does not match the basis dimension");
    double vals[kMaxFunctions];
    return strain_at(tau, basis, layout, q, reference.value.vector(), vals);
}

RodShape gvs_forward(const Eigen::VectorXd& q, const ShapeBasis& basis, DeformationModel model,
                     int steps, double length_m) {
    BasisLayout layout(basis, model);
    if (q.size() != layout.dim) throw DimensionMismatch("q does not match the basis dimension");
    Vec6 chi_bar = ReferenceStrain{}.value.vector();
    double vals[kMaxFunctions];
    return integrate_pose_field(
        [&](double tau) { return strain_at(tau, basis, layout, q, chi_bar, vals); }, steps,
        length_m);
}

GvsBackward gvs_backward(const RodShape& shape, const Eigen::VectorXd& q,
                         const ShapeBasis& basis, DeformationModel model,
                         const StiffnessMatrix& stiffness, double length,
                         const Twist& load, const std::optional<Twist>& tip_stress) {
    BasisLayout layout(basis, model);
    if (q.size() != layout.dim) throw DimensionMismatch("q does not match the basis dimension");
    if (shape.size() < 3) throw GridMismatch("shape too coarse for the backward pass");
    int steps = static_cast<int>(shape.size()) - 1;
    if (steps % 2 != 0) throw GridMismatch("backward pass needs an even interval count");

    Vec6 chi_bar = ReferenceStrain{}.value.vector();
    double vals[kMaxFunctions];
    Mat6 k = stiffness.normalized(length);

    Twist tip;
    if (tip_stress) {
        tip = *tip_stress;
    } else {
        Twist chi1 = strain_at(1.0, basis, layout, q, chi_bar, vals);
        tip = Twist(Vec6(k * (chi1.vector() - chi_bar)));
    }

    GvsBackward out;
    out.lambda.assign(shape.size(), Twist::Zero());
    out.lambda.back() = tip;

    bool with_load = !(load.angular.isZero() && load.linear.isZero());
    double h = -1.0 / steps;  // tip to base
    Pose node = shape.poses.back();
    Vec6 lam = tip.vector();
    using State12 = Eigen::Matrix<double, 12, 1>;
    for (int i = steps; i > 0; --i) {
        const Mat3 Rn = node.rotation;
        auto rhs = [&](double t, const State12& u) {
            Twist chi = strain_at(t, basis, layout, q, chi_bar, vals);
            Twist dl = ad_transpose_apply(chi, Twist(Vec6(u.tail<6>())));
            State12 du;
            du.segment<3>(0) = dexpinv_so3(Vec3(-u.head<3>())) * chi.angular;
            Mat3 R = Rn * exp_so3(u.head<3>());
            du.segment<3>(3) = R * chi.linear;
            du.segment<3>(6) = dl.angular;
            du.segment<3>(9) = dl.linear;
            if (with_load) {
                du.segment<3>(6) += R.transpose() * load.angular;
                du.segment<3>(9) += R.transpose() * load.linear;
            }
            return du;
        };
        State12 u = State12::Zero();
        u.segment<3>(3) = node.position;
        u.tail<6>() = lam;
        try {
            u = detail::rk4_step<12>(rhs, u, static_cast<double>(i) / steps, h);
        } catch (const NearSingular&) {
            throw IntegrationDiverged("backward sweep left the per-step trust region");
        }
        if (!u.allFinite()) throw IntegrationDiverged("backward sweep produced non-finite state");
        node.rotation = Rn * exp_so3(u.head<3>());
        node.position = u.segment<3>(3);
        lam = u.tail<6>();
        out.lambda[static_cast<std::size_t>(i) - 1] = Twist(lam);
    }

    // Q = -int Phi' B' Lambda dtau by composite Simpson on the grid.
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(layout.dim);
    for (int i = 0; i <= steps; ++i) {
        double w = (i == 0 || i == steps) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        accumulate_projection(-w / (3.0 * steps), shape.tau[static_cast<std::size_t>(i)], basis,
                              layout, out.lambda[static_cast<std::size_t>(i)].vector(), acc, vals);
    }
    out.generalized_force = acc;
    return out;
}

Eigen::MatrixXd gvs_stiffness(const ShapeBasis& basis, DeformationModel model,
                              const StiffnessMatrix& stiffness, double length) {
    BasisLayout layout(basis, model);
    Mat6 k = stiffness.normalized(length);
    Eigen::MatrixXd kee = Eigen::MatrixXd::Zero(layout.dim, layout.dim);
    double vals[kMaxFunctions];
    for (std::size_t m = 0; m < layout.modes.size(); ++m) {
        int n = basis.functions_per_mode[m];
        double km = k(layout.modes[m], layout.modes[m]);
        GaussRule rule = gauss_legendre(n);  // exact for degree 2n-2 products
        for (std::size_t g = 0; g < rule.nodes.size(); ++g) {
            basis.eval_mode(n, rule.nodes[g], vals);
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b)
                    kee(layout.offsets[m] + a, layout.offsets[m] + b) +=
                        rule.weights[g] * km * vals[a] * vals[b];
        }
    }
    return kee;
}

Eigen::MatrixXd gvs_jacobian(const RodShape& shape, const ShapeBasis& basis,
                             DeformationModel model) {
    BasisLayout layout(basis, model);
    if (shape.size() < 3) throw GridMismatch("shape too coarse for the jacobian");
    int steps = static_cast<int>(shape.size()) - 1;
    if (steps % 2 != 0) throw GridMismatch("jacobian quadrature needs an even interval count");
    double vals[kMaxFunctions];

    Eigen::MatrixXd integral = Eigen::MatrixXd::Zero(6, layout.dim);
    for (int i = 0; i <= steps; ++i) {
        double w = (i == 0 || i == steps) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        Mat6 adj = Ad(shape.poses[static_cast<std::size_t>(i)]);
        double tau = shape.tau[static_cast<std::size_t>(i)];
        for (std::size_t m = 0; m < layout.modes.size(); ++m) {
            int n = basis.functions_per_mode[m];
            basis.eval_mode(n, tau, vals);
            for (int j = 0; j < n; ++j)
                integral.col(layout.offsets[m] + j) +=
                    (w / (3.0 * steps)) * vals[j] * adj.col(layout.modes[m]);
        }
    }
    return Ad(shape.poses.back().inverse()) * integral;
}

namespace {

struct GvsProblem {
    const BoundaryConditions& bc;
    const ShapeBasis& basis;
    DeformationModel model;
    const StiffnessMatrix& stiffness;
    double length;
    Twist load;
    const GvsOptions& opt;
    Eigen::MatrixXd kee;
    int dim;

    Eigen::VectorXd residual(const Eigen::VectorXd& u, RodShape* shape_out = nullptr) const {
        Eigen::VectorXd q = u.head(dim);
        Twist tip_wrench(Vec6(u.tail<6>()));
        RodShape shape = gvs_forward(q, basis, model, opt.steps, length);
        GvsBackward back =
            gvs_backward(shape, q, basis, model, stiffness, length, load, tip_wrench);
        Eigen::VectorXd res(6 + dim);
        res.head<6>() = boundary_residual(shape.poses.back(), bc.tip);
        res.tail(dim) = kee * q + back.generalized_force;
        if (shape_out) *shape_out = std::move(shape);
        return res;
    }
};

struct NewtonOutcome {
    Eigen::VectorXd u;
    Eigen::VectorXd residual;
    RodShape shape;
    int iterations = 0;
    bool converged = false;
};

NewtonOutcome gvs_newton(const GvsProblem& prob, Eigen::VectorXd u) {
    const GvsOptions& opt = prob.opt;
    int n = prob.dim + 6;
    NewtonOutcome out;
    RodShape shape;
    Eigen::VectorXd res = prob.residual(u, &shape);

    int iter = 0;
    for (; iter < opt.max_iter; ++iter) {
        if (res.cwiseAbs().maxCoeff() <= 0.5 * opt.tol) break;

        Eigen::MatrixXd jac(n, n);
        for (int j = 0; j < n; ++j) {
            Eigen::VectorXd up = u;
            up[j] += opt.fd_step;
            jac.col(j) = (prob.residual(up) - res) / opt.fd_step;
        }

        // Minimum-norm solve; the tip-wrench block is rank deficient along
        // the axial force at straight configurations.
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(jac);
        cod.setThreshold(1e-8);
        Eigen::VectorXd step = cod.solve(-res);
        if (!step.allFinite()) break;
        double cap = 2.0 + 0.5 * u.norm();
        if (step.norm() > cap) step *= cap / step.norm();

        double alpha = 1.0;
        bool accepted = false;
        for (int k = 0; k <= opt.max_backtracks; ++k) {
            Eigen::VectorXd ut = u + alpha * step;
            RodShape ts;
            Eigen::VectorXd rt;
            try {
                rt = prob.residual(ut, &ts);
            } catch (const IntegrationDiverged&) {
                alpha *= 0.5;
                continue;
            }
            if (rt.norm() < res.norm() || k == opt.max_backtracks) {
                u = ut;
                res = rt;
                shape = std::move(ts);
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) break;
    }

    out.u = u;
    out.residual = res;
    out.shape = std::move(shape);
    out.iterations = iter;
    out.converged = res.cwiseAbs().maxCoeff() <= opt.tol;
    return out;
}

}  // namespace

GvsSolution solve_gvs(const BoundaryConditions& bc, const RodProperties& props,
                      const ShapeBasis& basis, DeformationModel model, const Twist& load,
                      const std::optional<GvsState>& guess, const GvsOptions& options) {
    props.validate();
    StiffnessMatrix stiffness = build_stiffness(props);
    BasisLayout layout(basis, model);

    GvsProblem prob{bc, basis, model, stiffness, props.length, load, options,
                    gvs_stiffness(basis, model, stiffness, props.length), layout.dim};

    Eigen::VectorXd u = Eigen::VectorXd::Zero(layout.dim + 6);
    if (guess) {
        if (guess->q.size() != layout.dim)
            throw DimensionMismatch("warm-start q does not match the basis dimension");
        u.head(layout.dim) = guess->q;
        u.tail<6>() = guess->tip_wrench.vector();
    } else {
        // Coaxial seed: the constant strain field of the tip rotation log,
        // with the matching constitutive tip wrench. Keeps cold starts on
        // the minimum-energy branch, like the other solvers.
        const Vec3* hint = bc.rotation_hint ? &*bc.rotation_hint : nullptr;
        Vec3 x_rel = log_so3(bc.tip.rotation, hint);
        Twist chi_const(x_rel, Vec3::Zero());
        for (std::size_t m = 0; m < layout.modes.size(); ++m)
            if (basis.functions_per_mode[m] > 0 && layout.modes[m] < 3)
                u[layout.offsets[m]] = chi_const.angular[layout.modes[m]];
        Mat6 k = stiffness.normalized(props.length);
        u.tail<6>() = k * chi_const.vector();
    }

    NewtonOutcome out = gvs_newton(prob, u);
    int total_iters = out.iterations;

    if (!out.converged && !guess.has_value() && options.allow_continuation) {
        for (int stages : {4, 8, 16}) {
            Eigen::VectorXd s = Eigen::VectorXd::Zero(layout.dim + 6);
            bool ok = true;
            for (int j = 1; j <= stages; ++j) {
                BoundaryConditions sub{continuation_bc(bc.tip, bc.rotation_hint,
                                                       static_cast<double>(j) / stages),
                                       bc.rotation_hint};
                GvsProblem sub_prob{sub, basis, model, stiffness, props.length,
                                    load, options, prob.kee, layout.dim};
                NewtonOutcome stage = gvs_newton(sub_prob, s);
                total_iters += stage.iterations;
                if (!stage.converged) {
                    ok = false;
                    break;
                }
                s = stage.u;
                if (j == stages) out = std::move(stage);
            }
            if (ok) break;
        }
    }

    GvsSolution sol;
    sol.state.q = out.u.head(layout.dim);
    sol.state.tip_wrench = Twist(Vec6(out.u.tail<6>()));
    sol.residual = out.residual;
    sol.shape = std::move(out.shape);
    sol.shape.diag.iterations = total_iters;
    sol.shape.diag.residual_norm = out.residual.cwiseAbs().maxCoeff();
    sol.shape.diag.converged = out.converged;
    if (!out.converged)
        throw NoConvergence("GVS boundary-condition iteration did not converge",
                            sol.shape.diag);
    return sol;
}

}  // namespace rodbench
