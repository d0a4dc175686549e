#pragma once

// Independent oracles for the tests: hand-written hat functions and Gauss rules,
// no use of the library's own assembly or evaluation routines.

#include "stpod/grid_fem.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <random>

namespace oracle {

using stpod::Index;
using stpod::Matrix;

// 3-point Gauss-Legendre on [-1, 1]
inline constexpr std::array<double, 3> kGaussX = {-0.77459666924148337704, 0.0, 0.77459666924148337704};
inline constexpr std::array<double, 3> kGaussW = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

struct Mesh {
    double a = 0.0;
    double b = 1.0;
    Index nodes = 2;
    bool dirichlet = false;

    double h() const { return (b - a) / static_cast<double>(nodes - 1); }
    Index dim() const { return dirichlet ? nodes - 2 : nodes; }
    Index node_of(Index basis) const { return dirichlet ? basis + 1 : basis; }
};

inline Mesh mesh_of(const stpod::Grid1D& g) {
    return {g.a(), g.b(), g.n_nodes(), g.boundary_mode() == stpod::BoundaryMode::ZeroDirichlet};
}

inline double hat(const Mesh& m, Index basis, double x) {
    const double center = m.a + static_cast<double>(m.node_of(basis)) * m.h();
    const double r = std::abs(x - center) / m.h();
    return r < 1.0 ? 1.0 - r : 0.0;
}

// Derivative of a hat at x, taking the cell to the right of x except at b.
inline double hat_derivative(const Mesh& m, Index basis, double x) {
    const Index node = m.node_of(basis);
    Index cell = static_cast<Index>(std::floor((x - m.a) / m.h()));
    cell = std::clamp<Index>(cell, 0, m.nodes - 2);
    if (node == cell) return -1.0 / m.h();
    if (node == cell + 1) return 1.0 / m.h();
    return 0.0;
}

// Integral over the mesh of f(x), 3-point Gauss on every cell.
inline double integrate(const Mesh& m, const std::function<double(double)>& f) {
    double sum = 0.0;
    for (Index c = 0; c + 1 < m.nodes; ++c) {
        const double x0 = m.a + static_cast<double>(c) * m.h();
        for (size_t k = 0; k < 3; ++k) {
            sum += kGaussW[k] * 0.5 * m.h() * f(x0 + 0.5 * (kGaussX[k] + 1.0) * m.h());
        }
    }
    return sum;
}

// Integral over the tensor mesh, 3x3 Gauss per cell.
inline double integrate2(const Mesh& mt, const Mesh& mx, const std::function<double(double, double)>& f) {
    double sum = 0.0;
    for (Index ct = 0; ct + 1 < mt.nodes; ++ct) {
        const double t0 = mt.a + static_cast<double>(ct) * mt.h();
        for (Index cx = 0; cx + 1 < mx.nodes; ++cx) {
            const double x0 = mx.a + static_cast<double>(cx) * mx.h();
            for (size_t i = 0; i < 3; ++i) {
                const double t = t0 + 0.5 * (kGaussX[i] + 1.0) * mt.h();
                for (size_t k = 0; k < 3; ++k) {
                    const double x = x0 + 0.5 * (kGaussX[k] + 1.0) * mx.h();
                    sum += kGaussW[i] * kGaussW[k] * 0.25 * mt.h() * mx.h() * f(t, x);
                }
            }
        }
    }
    return sum;
}

// sum_ij X(i, j) nu_i(x) psi_j(t)
inline double field_value(const Matrix& X, const Mesh& mt, const Mesh& mx, double t, double x) {
    double v = 0.0;
    for (Index i = 0; i < X.rows(); ++i) {
        const double ni = hat(mx, i, x);
        if (ni == 0.0) continue;
        for (Index j = 0; j < X.cols(); ++j) v += X(i, j) * ni * hat(mt, j, t);
    }
    return v;
}

inline double field_dt(const Matrix& X, const Mesh& mt, const Mesh& mx, double t, double x) {
    double v = 0.0;
    for (Index i = 0; i < X.rows(); ++i) {
        const double ni = hat(mx, i, x);
        if (ni == 0.0) continue;
        for (Index j = 0; j < X.cols(); ++j) v += X(i, j) * ni * hat_derivative(mt, j, t);
    }
    return v;
}

inline Matrix random_matrix(Index rows, Index cols, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Matrix m(rows, cols);
    for (Index j = 0; j < cols; ++j) {
        for (Index i = 0; i < rows; ++i) m(i, j) = dist(rng);
    }
    return m;
}

inline bool close_rel(double a, double b, double rel, double abs_floor = 0.0) {
    return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b)) + abs_floor;
}

}  // namespace oracle
