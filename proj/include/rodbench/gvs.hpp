#pragma once

#include <optional>

#include <Eigen/Dense>

#include "rodbench/ivp.hpp"
#include "rodbench/rod.hpp"
#include "rodbench/shooting.hpp"
#include "rodbench/types.hpp"

namespace rodbench {

enum class BasisKind { Monomial, Legendre };

/// Ritz shape functions: a polynomial basis per enabled deformation mode.
/// `functions_per_mode[m]` counts the basis functions of mode m (degrees
/// 0 .. n-1); the Legendre basis is shifted to [0,1].
struct ShapeBasis {
    BasisKind kind = BasisKind::Monomial;
    std::vector<int> functions_per_mode;

    int total() const;
    int max_functions() const;

    /// Values of the scalar basis of one mode at tau (out must hold n).
    void eval_mode(int n, double tau, double* out) const;
};

/// Construct a basis with the same function count on every enabled mode of
/// the deformation model ("degree n" = n+1 functions).
ShapeBasis make_basis(BasisKind kind, int functions, DeformationModel model);

/// Indices of the strain components enabled by the model (columns of B).
std::vector<int> enabled_modes(DeformationModel model);

/// Generalized coordinates plus the tip constraint wrench.
struct GvsState {
    Eigen::VectorXd q;
    Twist tip_wrench;
};

struct GvsOptions {
    int steps = 200;
    double tol = 1e-7;
    int max_iter = 200;
    double fd_step = 1e-7;
    int max_backtracks = 8;
    bool allow_continuation = true;
};

/// Ritz strain field chi(tau) = chibar + B Phi(tau) q.
Twist gvs_strain(double tau, const ShapeBasis& basis, DeformationModel model,
                 const Eigen::VectorXd& q, const ReferenceStrain& reference = {});

/// Forward kinematics pass, H' = H chi^.
RodShape gvs_forward(const Eigen::VectorXd& q, const ShapeBasis& basis, DeformationModel model,
                     int steps = 200, double length_m = 1.0);

struct GvsBackward {
    std::vector<Twist> lambda;           // stress field at the shape nodes
    Eigen::VectorXd generalized_force;   // Q = -int Phi' B' Lambda dtau
};

/// Backward statics pass: the stress ODE Lambda' = ad_chi^T Lambda + W_body
/// integrated tip-to-base from `tip_stress` (the constitutive tip value by
/// default), followed by projection onto the basis.
GvsBackward gvs_backward(const RodShape& shape, const Eigen::VectorXd& q,
                         const ShapeBasis& basis, DeformationModel model,
                         const StiffnessMatrix& stiffness, double length,
                         const Twist& load = Twist::Zero(),
                         const std::optional<Twist>& tip_stress = std::nullopt);

/// Generalized stiffness K_ee = int Phi' B' K B Phi dtau (Gauss quadrature,
/// exact for the polynomial integrand).
Eigen::MatrixXd gvs_stiffness(const ShapeBasis& basis, DeformationModel model,
                              const StiffnessMatrix& stiffness, double length);

/// Body-frame geometric Jacobian of the tip pose w.r.t. q,
/// J(1) = Ad_{H(1)}^-1 int Ad_{H} B Phi dtau.
Eigen::MatrixXd gvs_jacobian(const RodShape& shape, const ShapeBasis& basis,
                             DeformationModel model);

struct GvsSolution {
    RodShape shape;
    GvsState state;
    Eigen::VectorXd residual;

    const SolveDiagnostics& diagnostics() const { return shape.diag; }
};

/// Root-finding on (q, Lambda_1) against the pose boundary conditions and
/// the generalized equilibrium block.
GvsSolution solve_gvs(const BoundaryConditions& bc, const RodProperties& props,
                      const ShapeBasis& basis,
                      DeformationModel model = DeformationModel::InextensibleKirchhoff,
                      const Twist& load = Twist::Zero(),
                      const std::optional<GvsState>& guess = std::nullopt,
                      const GvsOptions& options = {});

}  // namespace rodbench
