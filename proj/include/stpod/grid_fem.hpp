#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace stpod {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Which nodes of a grid carry a basis function.
///  - AllNodes: every node (time grid, s = n_nodes)
///  - ZeroDirichlet: interior nodes only (space grid, q = n_nodes - 2)
enum class BoundaryMode { AllNodes, ZeroDirichlet };

/// Uniform 1D grid on [a, b] with piecewise linear hat functions.
class Grid1D {
public:
    Grid1D() = default;

    double a() const { return a_; }
    double b() const { return b_; }
    Index n_nodes() const { return n_nodes_; }
    double h() const { return h_; }
    BoundaryMode boundary_mode() const { return mode_; }

    /// Number of active basis functions.
    Index dim() const { return mode_ == BoundaryMode::AllNodes ? n_nodes_ : n_nodes_ - 2; }

    /// Node coordinate a + k*h.
    double node(Index k) const;

    /// Node index carrying active basis function `basis_index`.
    Index node_of_basis(Index basis_index) const {
        return mode_ == BoundaryMode::AllNodes ? basis_index : basis_index + 1;
    }

    /// Cell index containing `point`, clamped so the right endpoint belongs to the last cell.
    Index cell_of(double point) const;

    bool operator==(const Grid1D&) const = default;

private:
    friend Grid1D build_uniform_grid(double, double, Index, BoundaryMode);

    double a_ = 0.0;
    double b_ = 1.0;
    Index n_nodes_ = 2;
    double h_ = 1.0;
    BoundaryMode mode_ = BoundaryMode::AllNodes;
};

/// Throws std::invalid_argument for n_nodes < 2, b <= a, or a Dirichlet grid without interior nodes.
Grid1D build_uniform_grid(double a, double b, Index n_nodes, BoundaryMode mode);

/// Value of active hat function `basis_index` at `point`.
double eval_basis(const Grid1D& grid, Index basis_index, double point);

/// Gramians of the P1 tensor-product discretization for one (time, space) grid pair.
struct GramianSet {
    Matrix time_mass;        // M_S, s x s
    Matrix time_stiffness;   // K_S, s x s, singular (constants in kernel)
    Matrix time_advection;   // D_S[j, l] = int psi_l' psi_j
    Matrix space_mass;       // M_Y, q x q
    Matrix space_stiffness;  // A_Y = mu * int nu_i' nu_k', q x q
    Matrix time_mass_factor;       // L_S, lower triangular, M_S = L_S L_S^T
    Matrix space_mass_factor;      // L_Y, lower triangular
    Matrix time_stiffness_factor;  // J_S, s x r, K_S = J_S J_S^T
    double mu = 1.0;

    Index s() const { return time_mass.rows(); }
    Index q() const { return space_mass.rows(); }
};

/// P1 mass matrix over the active nodes of `grid`.
Matrix assemble_mass(const Grid1D& grid);
/// P1 stiffness matrix (int phi_i' phi_j') over the active nodes of `grid`.
Matrix assemble_stiffness(const Grid1D& grid);
/// P1 advection matrix D[j, l] = int phi_l' phi_j over the active nodes of `grid`.
Matrix assemble_advection(const Grid1D& grid);

/// Lower Cholesky factor; throws std::runtime_error if `spd` is not numerically SPD.
Matrix cholesky_lower(const Matrix& spd, const std::string& what);

/// Factor J with J J^T = psd from the symmetric eigendecomposition, dropping
/// eigenvalues below 1e-13 * lambda_max.
Matrix psd_factor(const Matrix& psd);

/// Requires an AllNodes time grid, a ZeroDirichlet space grid and mu > 0.
GramianSet assemble_gramians(const Grid1D& time_grid, const Grid1D& space_grid, double mu);

}  // namespace stpod
