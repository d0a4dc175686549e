#include "stpod/grid_fem.hpp"
#include "stpod/quadrature.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace stpod;

namespace {

Matrix oracle_gram(const Grid1D& grid, int kind) {
    const oracle::Mesh m = oracle::mesh_of(grid);
    Matrix out(m.dim(), m.dim());
    for (Index j = 0; j < m.dim(); ++j) {
        for (Index l = 0; l < m.dim(); ++l) {
            out(j, l) = oracle::integrate(m, [&](double x) {
                switch (kind) {
                case 0: return oracle::hat(m, j, x) * oracle::hat(m, l, x);
                case 1: return oracle::hat_derivative(m, j, x) * oracle::hat_derivative(m, l, x);
                default: return oracle::hat_derivative(m, l, x) * oracle::hat(m, j, x);
                }
            });
        }
    }
    return out;
}

}  // namespace

TEST_CASE("uniform grid nodes and dimensions") {
    const Grid1D t = build_uniform_grid(0.0, 1.0, 101, BoundaryMode::AllNodes);
    CHECK(t.dim() == 101);
    CHECK(t.h() == doctest::Approx(0.01));
    CHECK(t.node(37) == 0.0 + 37 * t.h());
    const Grid1D x = build_uniform_grid(-1.0, 2.0, 7, BoundaryMode::ZeroDirichlet);
    CHECK(x.dim() == 5);
    CHECK(x.node_of_basis(0) == 1);
    CHECK(x.cell_of(2.0) == 5);
    CHECK(x.cell_of(-1.0) == 0);

    CHECK_THROWS_AS(build_uniform_grid(0.0, 1.0, 1, BoundaryMode::AllNodes), std::invalid_argument);
    CHECK_THROWS_AS(build_uniform_grid(1.0, 1.0, 5, BoundaryMode::AllNodes), std::invalid_argument);
    CHECK_THROWS_AS(build_uniform_grid(0.0, 1.0, 2, BoundaryMode::ZeroDirichlet), std::invalid_argument);
}

TEST_CASE("hat functions") {
    const Grid1D g = build_uniform_grid(0.0, 2.0, 5, BoundaryMode::AllNodes);
    for (double x : {0.0, 0.3, 0.77, 1.5, 2.0}) {
        double sum = 0.0;
        for (Index i = 0; i < g.dim(); ++i) sum += eval_basis(g, i, x);
        CHECK(sum == doctest::Approx(1.0));
    }
    CHECK(eval_basis(g, 2, 1.0) == 1.0);
    CHECK(eval_basis(g, 2, 1.25) == doctest::Approx(0.5));
    CHECK_THROWS_AS(eval_basis(g, 5, 0.5), std::out_of_range);
    const Grid1D d = build_uniform_grid(0.0, 1.0, 5, BoundaryMode::ZeroDirichlet);
    CHECK(eval_basis(d, 0, 0.25) == 1.0);
    CHECK(eval_basis(d, 0, 0.0) == 0.0);
}

TEST_CASE("P1 Gramians match quadrature of the hats") {
    for (const auto mode : {BoundaryMode::AllNodes, BoundaryMode::ZeroDirichlet}) {
        for (Index n : {3, 4, 9}) {
            const Grid1D g = build_uniform_grid(-0.5, 1.7, n, mode);
            CHECK((assemble_mass(g) - oracle_gram(g, 0)).cwiseAbs().maxCoeff() < 1e-14);
            CHECK((assemble_stiffness(g) - oracle_gram(g, 1)).cwiseAbs().maxCoeff() < 1e-12);
            CHECK((assemble_advection(g) - oracle_gram(g, 2)).cwiseAbs().maxCoeff() < 1e-14);
        }
    }
}

TEST_CASE("three-node mass matrix by hand") {
    const Grid1D g = build_uniform_grid(0.0, 1.0, 3, BoundaryMode::AllNodes);
    Matrix expected(3, 3);
    expected << 2, 1, 0, 1, 4, 1, 0, 1, 2;
    expected *= 0.5 / 6.0;
    CHECK((assemble_mass(g) - expected).norm() < 1e-15);
}

TEST_CASE("advection matrix integrates by parts") {
    const Grid1D g = build_uniform_grid(0.0, 1.0, 6, BoundaryMode::AllNodes);
    const Matrix d = assemble_advection(g);
    Matrix boundary = Matrix::Zero(6, 6);
    boundary(0, 0) = -1.0;
    boundary(5, 5) = 1.0;
    CHECK((d + d.transpose() - boundary).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((d * Vector::Ones(6)).norm() < 1e-14);
    CHECK((assemble_stiffness(g) * Vector::Ones(6)).norm() < 1e-12);
}

TEST_CASE("factorizations") {
    const Grid1D g = build_uniform_grid(0.0, 1.0, 8, BoundaryMode::AllNodes);
    const Matrix m = assemble_mass(g);
    const Matrix l = cholesky_lower(m, "mass");
    CHECK((l * l.transpose() - m).norm() < 1e-15);
    CHECK(l.triangularView<Eigen::StrictlyUpper>().toDenseMatrix().norm() == 0.0);

    const Matrix k = assemble_stiffness(g);
    const Matrix j = psd_factor(k);
    CHECK(j.cols() == 7);
    CHECK((j * j.transpose() - k).norm() < 1e-12);
    CHECK_THROWS_AS(cholesky_lower(k, "stiffness"), std::runtime_error);
    CHECK_THROWS_AS(cholesky_lower(-m, "negative mass"), std::runtime_error);
}

TEST_CASE("Gramian set") {
    const Grid1D t = build_uniform_grid(0.0, 1.0, 5, BoundaryMode::AllNodes);
    const Grid1D x = build_uniform_grid(0.0, 1.0, 8, BoundaryMode::ZeroDirichlet);
    const GramianSet g = assemble_gramians(t, x, 0.4);
    CHECK(g.s() == 5);
    CHECK(g.q() == 6);
    CHECK((g.space_stiffness - 0.4 * assemble_stiffness(x)).norm() < 1e-14);
    CHECK((g.space_mass_factor * g.space_mass_factor.transpose() - g.space_mass).norm() < 1e-15);
    CHECK_THROWS_AS(assemble_gramians(t, x, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(assemble_gramians(x, x, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(assemble_gramians(t, t, 1.0), std::invalid_argument);
}

TEST_CASE("Gauss-Legendre rules") {
    for (int n = 1; n <= 8; ++n) {
        const QuadratureRule r = gauss_legendre(n);
        for (int p = 0; p <= 2 * n - 1; ++p) {
            double sum = 0.0;
            for (size_t k = 0; k < r.points.size(); ++k) sum += r.weights[k] * std::pow(r.points[k], p);
            const double exact = p % 2 == 1 ? 0.0 : 2.0 / (p + 1);
            CHECK(sum == doctest::Approx(exact).epsilon(1e-14));
        }
    }
    const QuadratureRule r3 = gauss_legendre(3);
    CHECK(r3.points[2] == doctest::Approx(std::sqrt(0.6)).epsilon(1e-15));
    CHECK(r3.weights[1] == doctest::Approx(8.0 / 9.0).epsilon(1e-15));
    CHECK_THROWS_AS(gauss_legendre(0), std::invalid_argument);
}
