#include "stpod/galerkin_solver.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace stpod;
using std::numbers::pi;

namespace {

struct Setup {
    Grid1D time;
    Grid1D space;
    GramianSet g;
};

Setup make_setup(Index n_time, Index n_space, double mu) {
    Setup s;
    s.time = build_uniform_grid(0.0, 1.0, n_time, BoundaryMode::AllNodes);
    s.space = build_uniform_grid(0.0, 1.0, n_space, BoundaryMode::ZeroDirichlet);
    s.g = assemble_gramians(s.time, s.space, mu);
    return s;
}

double central_dt(const SpaceTimeFunction& f, double t, double x, double h) {
    return (f(t + h, x) - f(t - h, x)) / (2.0 * h);
}

double central_dxx(const SpaceTimeFunction& f, double t, double x, double h) {
    return (f(t, x + h) - 2.0 * f(t, x) + f(t, x - h)) / (h * h);
}

}  // namespace

TEST_CASE("Example 1 partial derivatives against finite differences") {
    const ManufacturedSolution ms = example1_solution();
    for (double t : {0.1, 0.35, 0.8}) {
        for (double x : {0.05, 0.4, 0.77}) {
            CHECK(std::abs(ms.dt(t, x) - central_dt(ms.value, t, x, 1e-5)) < 1e-5);
            CHECK(std::abs(ms.dxx(t, x) - central_dxx(ms.value, t, x, 1e-4)) < 1e-5);
        }
    }
    const SpaceTimeFunction f = manufactured_forcing(ms, 0.4);
    CHECK(f(0.3, 0.6) == doctest::Approx(ms.dt(0.3, 0.6) - 0.4 * ms.dxx(0.3, 0.6)));
    const ProblemSpec p = example1_problem();
    CHECK(p.mu == 0.4);
    REQUIRE(p.exact_solution);
    for (double t : {0.0, 0.5, 1.0}) {
        CHECK(std::abs((*p.exact_solution)(t, 0.0)) < 1e-12);
        CHECK(std::abs((*p.exact_solution)(t, 1.0)) < 1e-12);
    }
    CHECK(p.initial(0.3) == doctest::Approx(10.0 * std::sin(0.3 * pi) * std::cos(-0.9) * 0.3 * std::pow(-0.7, 3)));
}

TEST_CASE("manufactured forcing of trivial solutions") {
    ManufacturedSolution zero{[](double, double) { return 0.0; }, [](double, double) { return 0.0; },
                              [](double, double) { return 0.0; }};
    CHECK(manufactured_forcing(zero, 2.0)(0.3, 0.4) == 0.0);
    ManufacturedSolution steady{[](double, double x) { return std::sin(pi * x); }, [](double, double) { return 0.0; },
                                [](double, double x) { return -pi * pi * std::sin(pi * x); }};
    CHECK(manufactured_forcing(steady, 0.5)(0.9, 0.25) == doctest::Approx(0.5 * pi * pi * std::sin(0.25 * pi)));
}

TEST_CASE("Example 2 forcing") {
    const ProblemSpec p = example2_problem();
    CHECK(p.mu == 1.0);
    CHECK(p.initial(0.3) == 0.0);
    CHECK(example2_forcing(0.5, 0.5) == 0.0);
    CHECK(example2_forcing(0.5, 0.5 + 0.4) == 5.0);
    CHECK(example2_forcing(0.5 + 0.36, 0.5) == 5.0);
    CHECK(example2_forcing(0.25, 0.25) == 5.0);
    CHECK(example2_forcing(0.5, 0.5 + 0.45) == 0.0);
}

TEST_CASE("right-hand side assembly") {
    const Setup s = make_setup(6, 9, 1.0);
    CHECK(assemble_rhs([](double, double) { return 0.0; }, s.time, s.space, 3).norm() == 0.0);

    const Matrix ones = assemble_rhs([](double, double) { return 1.0; }, s.time, s.space, 3);
    const double ht = s.time.h();
    const double hx = s.space.h();
    for (Index j = 0; j < s.g.s(); ++j) {
        const double time_integral = (j == 0 || j == s.g.s() - 1) ? 0.5 * ht : ht;
        for (Index i = 0; i < s.g.q(); ++i) CHECK(ones(i, j) == doctest::Approx(hx * time_integral).epsilon(1e-13));
    }

    // separable polynomial integrand against the hat oracle
    auto f = [](double t, double x) { return (1.0 + t * t) * x * (2.0 - x); };
    const Matrix F = assemble_rhs(f, s.time, s.space, 3, 2);
    const oracle::Mesh mt = oracle::mesh_of(s.time);
    const oracle::Mesh mx = oracle::mesh_of(s.space);
    for (Index j : {0, 2, 5}) {
        for (Index i : {0, 3, 6}) {
            const double ref = oracle::integrate2(
                mt, mx, [&](double t, double x) { return f(t, x) * oracle::hat(mx, i, x) * oracle::hat(mt, j, t); });
            CHECK(F(i, j) == doctest::Approx(ref).epsilon(1e-13));
        }
    }
    CHECK_THROWS_AS(assemble_rhs(f, s.time, s.space, 1), std::invalid_argument);
    CHECK_THROWS_AS(assemble_rhs(f, s.time, s.space, 3, 0), std::invalid_argument);
}

TEST_CASE("ring forcing integrates to 3 pi / 8") {
    const Grid1D t = build_uniform_grid(0.0, 1.0, 101, BoundaryMode::AllNodes);
    const Grid1D x = build_uniform_grid(0.0, 1.0, 101, BoundaryMode::AllNodes);
    const double total = assemble_rhs(example2_forcing, t, x, 3, 4).sum();
    CHECK(total == doctest::Approx(3.0 * pi / 8.0).epsilon(2e-4));
}

TEST_CASE("initial projection") {
    const Grid1D x = build_uniform_grid(0.0, 1.0, 21, BoundaryMode::ZeroDirichlet);
    CHECK(project_initial([](double) { return 0.0; }, x).norm() == 0.0);

    // a member of Y: piecewise linear interpolant of a tent
    auto tent = [](double xi) { return xi < 0.5 ? xi : 1.0 - xi; };
    const Vector c = project_initial(tent, x);
    for (Index i = 0; i < x.dim(); ++i) CHECK(c(i) == doctest::Approx(tent(x.node(i + 1))).epsilon(1e-10));

    // Example 1 at tau = 0 against a 3-point Gauss oracle on 16 sub-cells per cell
    const ProblemSpec p = example1_problem();
    const Vector c1 = project_initial(p.initial, x);
    const oracle::Mesh fine{0.0, 1.0, 16 * 20 + 1, false};
    const oracle::Mesh mx = oracle::mesh_of(x);
    Vector load(x.dim());
    for (Index i = 0; i < x.dim(); ++i) {
        load(i) = oracle::integrate(fine, [&](double xi) { return p.initial(xi) * oracle::hat(mx, i, xi); });
    }
    const Vector ref = assemble_mass(x).fullPivLu().solve(load);
    CHECK((c1 - ref).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("homogeneous FOM is zero") {
    const Setup s = make_setup(6, 7, 1.0);
    ProblemSpec p;
    p.forcing = [](double, double) { return 0.0; };
    p.initial = [](double) { return 0.0; };
    const FomSolution fom = solve_fom(p, s.g, s.time, s.space);
    CHECK(fom.field.coeffs().norm() == 0.0);
}

TEST_CASE("FOM imposes the initial column and solves the test rows") {
    const Setup s = make_setup(21, 21, 0.4);
    const ProblemSpec p = example1_problem();
    const FomSolution fom = solve_fom(p, s.g, s.time, s.space);
    const Vector c = project_initial(p.initial, s.space);
    CHECK(fom.field.coeffs().col(0) == c);
    CHECK(fom.residual_max <= 1e-9 * fom.rhs.cwiseAbs().maxCoeff());
    CHECK(fom.condition_estimate > 1.0);

    FomOptions dense;
    dense.solver = SolverKind::Dense;
    const FomSolution fd = solve_fom(p, s.g, s.time, s.space, dense);
    CHECK((fd.field.coeffs() - fom.field.coeffs()).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(fd.field.coeffs().col(0) == c);
}

TEST_CASE("steady state is preserved") {
    const Setup s = make_setup(11, 16, 0.7);
    ProblemSpec p;
    p.mu = 0.7;
    p.forcing = [](double, double x) { return std::sin(pi * x) + x; };
    // x0 is chosen so that its projection solves A_Y c = rhs
    const Matrix F = assemble_rhs(p.forcing, s.time, s.space, 3);
    const Vector b = F.col(1) / (s.time.h());  // int f nu_i, since F(:, j) = h_t * b for interior j
    const Vector steady = s.g.space_stiffness.llt().solve(b);
    SpaceTimeSystem sys;
    sys.space_mass = s.g.space_mass;
    sys.space_stiffness = s.g.space_stiffness;
    sys.time_advection = s.g.time_advection;
    sys.time_mass = s.g.time_mass;
    sys.rhs = F;
    sys.initial = steady;
    const SolveResult r = solve_space_time(sys);
    for (Index j = 0; j < s.g.s(); ++j) CHECK((r.coeffs.col(j) - steady).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("heat decays without forcing") {
    const Setup s = make_setup(101, 41, 1.0);
    ProblemSpec p;
    p.forcing = [](double, double) { return 0.0; };
    p.initial = [](double x) { return std::sin(pi * x) + 0.3 * std::sin(4.0 * pi * x); };
    const FomSolution fom = solve_fom(p, s.g, s.time, s.space);
    const Matrix& X = fom.field.coeffs();
    auto l2 = [&](Index j) { return std::sqrt(X.col(j).dot(s.g.space_mass * X.col(j))); };
    CHECK(l2(100) <= l2(0));
    for (Index j = 1; j < 101; ++j) CHECK(l2(j) <= l2(j - 1) + 1e-12);
}

TEST_CASE("FOM converges at second order on Example 1") {
    const ProblemSpec p = example1_problem();
    double previous = 0.0;
    for (Index n : {11, 21}) {
        const Setup s = make_setup(n, n, 0.4);
        const double err = l2_error(solve_fom(p, s.g, s.time, s.space).field, *p.exact_solution);
        if (previous > 0.0) {
            CHECK(previous / err > 3.5);
            CHECK(previous / err < 4.5);
        }
        previous = err;
    }
}

TEST_CASE("full-dimension ROM reproduces the FOM") {
    const Setup s = make_setup(5, 8, 0.4);
    const ProblemSpec p = example1_problem();
    const FomSolution fom = solve_fom(p, s.g, s.time, s.space);
    const SpaceReducedBasis sb = reduce_space(fom.field, s.g, s.g.q());
    const TimeReducedBasisIC tb = reduce_time_ic(fom.field, s.g, s.g.s());
    const SpaceTimeSystem rom = assemble_rom(s.g, sb, tb, fom.rhs, fom.initial);
    CHECK((rom.space_mass - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((rom.time_mass - tb.reduced_mass).cwiseAbs().maxCoeff() < 1e-12);
    const RomSolution sol = solve_rom(rom, sb, tb, s.time, s.space);
    const double rel = (sol.lifted.coeffs() - fom.field.coeffs()).norm() / fom.field.coeffs().norm();
    CHECK(rel < 1e-8);
    CHECK_FALSE(sol.ill_conditioned);

    // psi_hat = U_hat^T L_S^{-1} psi gives the lift T_Y Xhat U_hat^T L_S^{-1}
    const Matrix ls_inv = s.g.time_mass_factor.inverse();
    const Matrix alt = sb.transform * sol.reduced * (tb.u_hat.transpose() * ls_inv);
    CHECK((alt - sol.lifted.coeffs()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("ROM of the homogeneous problem is zero") {
    const Setup s = make_setup(6, 8, 1.0);
    std::mt19937_64 rng(9);
    const CoefficientField x(oracle::random_matrix(s.g.q(), s.g.s(), rng), s.time, s.space);
    const SpaceReducedBasis sb = reduce_space(x, s.g, 3);
    const TimeReducedBasisIC tb = reduce_time_ic(x, s.g, 4);
    const SpaceTimeSystem rom =
        assemble_rom(s.g, sb, tb, Matrix::Zero(s.g.q(), s.g.s()), Vector::Zero(s.g.q()));
    const RomSolution sol = solve_rom(rom, sb, tb, s.time, s.space);
    CHECK(sol.reduced.norm() == 0.0);
    CHECK(sol.lifted.coeffs().norm() == 0.0);
    CHECK_THROWS_AS(assemble_rom(s.g, sb, tb, Matrix::Zero(2, 2), Vector::Zero(s.g.q())), std::invalid_argument);
}

TEST_CASE("space-time system shape checks") {
    SpaceTimeSystem sys;
    sys.space_mass = Matrix::Identity(2, 2);
    sys.space_stiffness = Matrix::Identity(2, 2);
    sys.time_advection = Matrix::Identity(3, 3);
    sys.time_mass = Matrix::Identity(3, 3);
    sys.rhs = Matrix::Zero(2, 2);
    sys.initial = Vector::Zero(2);
    CHECK_THROWS_AS(solve_space_time(sys), std::invalid_argument);
}
