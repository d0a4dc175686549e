#include "stpod/grid_fem.hpp"

#include <algorithm>
#include <cmath>

namespace stpod {

Grid1D build_uniform_grid(double a, double b, Index n_nodes, BoundaryMode mode) {
    if (n_nodes < 2) {
        throw std::invalid_argument("grid needs at least 2 nodes, got " + std::to_string(n_nodes));
    }
    if (!(b > a)) {
        throw std::invalid_argument("grid requires b > a");
    }
    if (mode == BoundaryMode::ZeroDirichlet && n_nodes < 3) {
        throw std::invalid_argument("Dirichlet grid needs at least one interior node");
    }
    Grid1D g;
    g.a_ = a;
    g.b_ = b;
    g.n_nodes_ = n_nodes;
    g.h_ = (b - a) / static_cast<double>(n_nodes - 1);
    g.mode_ = mode;
    return g;
}

double Grid1D::node(Index k) const { return a_ + static_cast<double>(k) * h_; }

Index Grid1D::cell_of(double point) const {
    auto cell = static_cast<Index>(std::floor((point - a_) / h_));
    return std::clamp<Index>(cell, 0, n_nodes_ - 2);
}

double eval_basis(const Grid1D& grid, Index basis_index, double point) {
    if (basis_index < 0 || basis_index >= grid.dim()) {
        throw std::out_of_range("basis index " + std::to_string(basis_index) + " out of range");
    }
    if (point < grid.a() || point > grid.b()) {
        throw std::out_of_range("evaluation point outside the grid interval");
    }
    const double center = grid.node(grid.node_of_basis(basis_index));
    const double r = std::abs(point - center) / grid.h();
    return r >= 1.0 ? 0.0 : 1.0 - r;
}

namespace {

// Scatter a 2x2 element matrix over all nodes, then restrict to the active ones.
template <typename Local>
Matrix assemble(const Grid1D& grid, const Local& local) {
    const Index n = grid.n_nodes();
    Matrix full = Matrix::Zero(n, n);
    for (Index e = 0; e + 1 < n; ++e) {
        full.block(e, e, 2, 2) += local;
    }
    if (grid.boundary_mode() == BoundaryMode::AllNodes) return full;
    return full.block(1, 1, n - 2, n - 2);
}

}  // namespace

Matrix assemble_mass(const Grid1D& grid) {
    Eigen::Matrix2d local;
    local << 2.0, 1.0, 1.0, 2.0;
    return assemble(grid, Eigen::Matrix2d(local * (grid.h() / 6.0)));
}

Matrix assemble_stiffness(const Grid1D& grid) {
    Eigen::Matrix2d local;
    local << 1.0, -1.0, -1.0, 1.0;
    return assemble(grid, Eigen::Matrix2d(local / grid.h()));
}

Matrix assemble_advection(const Grid1D& grid) {
    // row = test function, column = differentiated trial function
    Eigen::Matrix2d local;
    local << -0.5, 0.5, -0.5, 0.5;
    return assemble(grid, local);
}

Matrix cholesky_lower(const Matrix& spd, const std::string& what) {
    Eigen::LLT<Matrix> llt(spd);
    if (llt.info() != Eigen::Success) {
        throw std::runtime_error("Cholesky factorization of " + what + " failed (matrix not SPD)");
    }
    Matrix lower = llt.matrixL();
    const Vector pivots = lower.diagonal().cwiseAbs2();
    if (pivots.minCoeff() <= 1e-13 * spd.diagonal().cwiseAbs().maxCoeff()) {
        throw std::runtime_error("Cholesky factorization of " + what + " failed (numerically singular)");
    }
    return lower;
}

Matrix psd_factor(const Matrix& psd) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(psd);
    if (eig.info() != Eigen::Success) {
        throw std::runtime_error("eigendecomposition of PSD matrix failed");
    }
    const Vector& lambda = eig.eigenvalues();
    const double cutoff = 1e-13 * lambda.maxCoeff();
    Index kept = 0;
    for (Index k = 0; k < lambda.size(); ++k) {
        if (lambda(k) >= cutoff && lambda(k) > 0.0) ++kept;
    }
    Matrix factor(psd.rows(), kept);
    Index col = 0;
    for (Index k = 0; k < lambda.size(); ++k) {
        if (lambda(k) >= cutoff && lambda(k) > 0.0) {
            factor.col(col++) = eig.eigenvectors().col(k) * std::sqrt(lambda(k));
        }
    }
    return factor;
}

GramianSet assemble_gramians(const Grid1D& time_grid, const Grid1D& space_grid, double mu) {
    if (time_grid.boundary_mode() != BoundaryMode::AllNodes) {
        throw std::invalid_argument("time grid must expose all nodes");
    }
    if (space_grid.boundary_mode() != BoundaryMode::ZeroDirichlet) {
        throw std::invalid_argument("space grid must use zero Dirichlet boundary");
    }
    if (!(mu > 0.0)) {
        throw std::invalid_argument("diffusion coefficient mu must be positive");
    }
    GramianSet g;
    g.mu = mu;
    g.time_mass = assemble_mass(time_grid);
    g.time_stiffness = assemble_stiffness(time_grid);
    g.time_advection = assemble_advection(time_grid);
    g.space_mass = assemble_mass(space_grid);
    g.space_stiffness = mu * assemble_stiffness(space_grid);
    g.time_mass_factor = cholesky_lower(g.time_mass, "time mass matrix");
    g.space_mass_factor = cholesky_lower(g.space_mass, "space mass matrix");
    g.time_stiffness_factor = psd_factor(g.time_stiffness);
    return g;
}

}  // namespace stpod
