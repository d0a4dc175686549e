#pragma once

#include "stpod/pod_reduction.hpp"

#include <functional>
#include <optional>
#include <string>

namespace stpod {

using SpaceTimeFunction = std::function<double(double tau, double xi)>;
using SpaceFunction = std::function<double(double xi)>;

/// x_t - mu * x_xx = f on (0, T) x (omega_a, omega_b), x = 0 on the spatial boundary, x(0) = x0.
struct ProblemSpec {
    double mu = 1.0;
    SpaceTimeFunction forcing;
    SpaceFunction initial;
    double final_time = 1.0;
    double omega_a = 0.0;
    double omega_b = 1.0;
    std::optional<SpaceTimeFunction> exact_solution;
};

/// Exact solution with closed-form partial derivatives.
struct ManufacturedSolution {
    SpaceTimeFunction value;
    SpaceTimeFunction dt;   // x_tau
    SpaceTimeFunction dxx;  // x_xi xi
};

/// f = x_tau - mu * x_xi xi.
SpaceTimeFunction manufactured_forcing(const ManufacturedSolution& exact, double mu);

/// x = 10 sin(pi xi - 2 tau) cos(pi tau - 3 xi) xi (xi - 1)^3
ManufacturedSolution example1_solution();
/// Manufactured problem on [0,1]^2 with the solution above; mu defaults to 0.4.
ProblemSpec example1_problem(double mu = 0.4);
/// f = 5 on the ring 1/8 <= (tau-1/2)^2 + (xi-1/2)^2 < 1/5, zero elsewhere.
double example2_forcing(double tau, double xi);
/// x0 = 0, f = example2_forcing, mu defaults to 1.
ProblemSpec example2_problem(double mu = 1.0);

/// F(i, j) = int int f nu_i psi_j by per-cell Gauss-Legendre with `quad_order` points per
/// direction, each space-time cell split into `subdivision` x `subdivision` pieces.
Matrix assemble_rhs(const SpaceTimeFunction& forcing, const Grid1D& time_grid, const Grid1D& space_grid,
                    int quad_order, int subdivision = 1);

/// L2 projection of x0 onto the active space basis (solves M c = b).
Vector project_initial(const SpaceFunction& initial, const Grid1D& space_grid, int quad_order = 5);

/// Tensor-structured linear system  Ms X Dt^T + As X Mt^T = F  whose first column is replaced by
/// the constraint X(:, 0) = initial. Used for both the full and the reduced model.
struct SpaceTimeSystem {
    Matrix space_mass;
    Matrix space_stiffness;
    Matrix time_advection;
    Matrix time_mass;
    Matrix rhs;
    Vector initial;

    /// Ms X Dt^T + As X Mt^T
    Matrix apply(const Matrix& coeffs) const;
    /// Largest absolute residual over the test columns 1..n-1.
    double residual_max(const Matrix& coeffs) const;
};

enum class SolverKind {
    Modal,  // generalized eigenbasis in space, one small time system per mode
    Dense,  // Kronecker system with LU, small problems only
};

struct SolveResult {
    Matrix coeffs;
    double condition_estimate = 0.0;  // max 1-norm condition over the per-mode time systems; 0 if not computed
    double residual_max = 0.0;
};

/// Throws std::runtime_error when the constrained system is singular.
SolveResult solve_space_time(const SpaceTimeSystem& system, SolverKind kind = SolverKind::Modal,
                             bool estimate_condition = false);

struct FomOptions {
    int quad_order = 3;
    int subdivision = 1;
    SolverKind solver = SolverKind::Modal;
};

struct FomSolution {
    CoefficientField field;
    Matrix rhs;
    Vector initial;
    double condition_estimate = 0.0;
    double residual_max = 0.0;
};

/// FOM system with the RHS and projected initial condition for `problem`.
SpaceTimeSystem assemble_fom(const ProblemSpec& problem, const GramianSet& g, const Grid1D& time_grid,
                             const Grid1D& space_grid, const FomOptions& options = {});

FomSolution solve_fom(const ProblemSpec& problem, const GramianSet& g, const Grid1D& time_grid,
                      const Grid1D& space_grid, const FomOptions& options = {});

/// Reduced system obtained by congruence with T_Y = L_Y^{-T} V_hat and T_S = L_S^{-T} U_hat.
/// The reduced initial column is V_hat^T L_Y^T c, the orthonormal-basis coefficients of Pi_Yhat c.
SpaceTimeSystem assemble_rom(const GramianSet& g, const SpaceReducedBasis& space_basis,
                             const TimeReducedBasisIC& time_basis, const Matrix& rhs, const Vector& initial);

struct RomSolution {
    Matrix reduced;  // q_hat x s_hat
    CoefficientField lifted;
    double condition_estimate = 0.0;
    bool ill_conditioned = false;
};

/// Condition estimates above this mark a ROM solve as ill-conditioned.
inline constexpr double kIllConditioned = 1e12;

RomSolution solve_rom(const SpaceTimeSystem& system, const SpaceReducedBasis& space_basis,
                      const TimeReducedBasisIC& time_basis, const Grid1D& time_grid, const Grid1D& space_grid);

/// X_lift = T_Y Xhat T_S^T
Matrix lift_reduced(const Matrix& reduced, const SpaceReducedBasis& space_basis,
                    const TimeReducedBasisIC& time_basis);

/// L2(0,T; L2(Omega)) distance between a discrete field and a continuous function,
/// by per-cell Gauss-Legendre quadrature.
double l2_error(const CoefficientField& field, const SpaceTimeFunction& exact, int quad_order = 4);

}  // namespace stpod
