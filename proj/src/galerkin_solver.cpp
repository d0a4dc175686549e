#include "stpod/galerkin_solver.hpp"

#include "stpod/quadrature.hpp"

#include <cmath>
#include <numbers>

namespace stpod {

using std::numbers::pi;

SpaceTimeFunction manufactured_forcing(const ManufacturedSolution& exact, double mu) {
    return [dt = exact.dt, dxx = exact.dxx, mu](double tau, double xi) { return dt(tau, xi) - mu * dxx(tau, xi); };
}

ManufacturedSolution example1_solution() {
    // x = 10 a b p with a = sin(pi xi - 2 tau), b = cos(pi tau - 3 xi), p = xi (xi - 1)^3
    ManufacturedSolution ms;
    ms.value = [](double tau, double xi) {
        return 10.0 * std::sin(pi * xi - 2.0 * tau) * std::cos(pi * tau - 3.0 * xi) * xi * std::pow(xi - 1.0, 3);
    };
    ms.dt = [](double tau, double xi) {
        const double a = std::sin(pi * xi - 2.0 * tau);
        const double b = std::cos(pi * tau - 3.0 * xi);
        const double a_t = -2.0 * std::cos(pi * xi - 2.0 * tau);
        const double b_t = -pi * std::sin(pi * tau - 3.0 * xi);
        return 10.0 * xi * std::pow(xi - 1.0, 3) * (a_t * b + a * b_t);
    };
    ms.dxx = [](double tau, double xi) {
        const double a = std::sin(pi * xi - 2.0 * tau);
        const double b = std::cos(pi * tau - 3.0 * xi);
        const double a_x = pi * std::cos(pi * xi - 2.0 * tau);
        const double a_xx = -pi * pi * a;
        const double b_x = 3.0 * std::sin(pi * tau - 3.0 * xi);
        const double b_xx = -9.0 * b;
        const double g = a * b;
        const double g_x = a_x * b + a * b_x;
        const double g_xx = a_xx * b + 2.0 * a_x * b_x + a * b_xx;
        const double p = xi * std::pow(xi - 1.0, 3);
        const double p_x = (xi - 1.0) * (xi - 1.0) * (4.0 * xi - 1.0);
        const double p_xx = 6.0 * (xi - 1.0) * (2.0 * xi - 1.0);
        return 10.0 * (g_xx * p + 2.0 * g_x * p_x + g * p_xx);
    };
    return ms;
}

ProblemSpec example1_problem(double mu) {
    const ManufacturedSolution ms = example1_solution();
    ProblemSpec p;
    p.mu = mu;
    p.forcing = manufactured_forcing(ms, mu);
    p.initial = [value = ms.value](double xi) { return value(0.0, xi); };
    p.exact_solution = ms.value;
    return p;
}

double example2_forcing(double tau, double xi) {
    const double r2 = (tau - 0.5) * (tau - 0.5) + (xi - 0.5) * (xi - 0.5);
    return (r2 >= 1.0 / 8.0 && r2 < 1.0 / 5.0) ? 5.0 : 0.0;
}

ProblemSpec example2_problem(double mu) {
    ProblemSpec p;
    p.mu = mu;
    p.forcing = example2_forcing;
    p.initial = [](double) { return 0.0; };
    return p;
}

namespace {

// Active basis index of a grid node, -1 for an eliminated Dirichlet node.
Index active_index(const Grid1D& grid, Index node) {
    if (grid.boundary_mode() == BoundaryMode::AllNodes) return node;
    return (node == 0 || node == grid.n_nodes() - 1) ? -1 : node - 1;
}

}  // namespace

Matrix assemble_rhs(const SpaceTimeFunction& forcing, const Grid1D& time_grid, const Grid1D& space_grid,
                    int quad_order, int subdivision) {
    if (quad_order < 2) throw std::invalid_argument("quadrature order must be at least 2");
    if (subdivision < 1) throw std::invalid_argument("subdivision must be at least 1");
    const QuadratureRule rule = gauss_legendre(quad_order);
    const double ht = time_grid.h();
    const double hx = space_grid.h();
    const double sub_t = ht / subdivision;
    const double sub_x = hx / subdivision;
    Matrix rhs = Matrix::Zero(space_grid.dim(), time_grid.dim());

    for (Index ct = 0; ct + 1 < time_grid.n_nodes(); ++ct) {
        const double t0 = time_grid.node(ct);
        const Index col[2] = {active_index(time_grid, ct), active_index(time_grid, ct + 1)};
        for (Index cx = 0; cx + 1 < space_grid.n_nodes(); ++cx) {
            const double x0 = space_grid.node(cx);
            const Index row[2] = {active_index(space_grid, cx), active_index(space_grid, cx + 1)};
            double local[2][2] = {{0.0, 0.0}, {0.0, 0.0}};  // [space][time]
            for (int st = 0; st < subdivision; ++st) {
                for (int sx = 0; sx < subdivision; ++sx) {
                    for (size_t a = 0; a < rule.points.size(); ++a) {
                        const double tau = t0 + (st + 0.5 * (rule.points[a] + 1.0)) * sub_t;
                        const double lt = (tau - t0) / ht;
                        for (size_t b = 0; b < rule.points.size(); ++b) {
                            const double xi = x0 + (sx + 0.5 * (rule.points[b] + 1.0)) * sub_x;
                            const double lx = (xi - x0) / hx;
                            const double w = rule.weights[a] * rule.weights[b] * 0.25 * sub_t * sub_x;
                            const double fw = w * forcing(tau, xi);
                            local[0][0] += fw * (1.0 - lx) * (1.0 - lt);
                            local[0][1] += fw * (1.0 - lx) * lt;
                            local[1][0] += fw * lx * (1.0 - lt);
                            local[1][1] += fw * lx * lt;
                        }
                    }
                }
            }
            for (int i = 0; i < 2; ++i) {
                if (row[i] < 0) continue;
                for (int j = 0; j < 2; ++j) {
                    if (col[j] >= 0) rhs(row[i], col[j]) += local[i][j];
                }
            }
        }
    }
    return rhs;
}

Vector project_initial(const SpaceFunction& initial, const Grid1D& space_grid, int quad_order) {
    const QuadratureRule rule = gauss_legendre(quad_order);
    const double hx = space_grid.h();
    Vector load = Vector::Zero(space_grid.dim());
    for (Index cx = 0; cx + 1 < space_grid.n_nodes(); ++cx) {
        const double x0 = space_grid.node(cx);
        const Index row[2] = {active_index(space_grid, cx), active_index(space_grid, cx + 1)};
        for (size_t b = 0; b < rule.points.size(); ++b) {
            const double lx = 0.5 * (rule.points[b] + 1.0);
            const double fw = rule.weights[b] * 0.5 * hx * initial(x0 + lx * hx);
            if (row[0] >= 0) load(row[0]) += fw * (1.0 - lx);
            if (row[1] >= 0) load(row[1]) += fw * lx;
        }
    }
    Eigen::LLT<Matrix> llt(assemble_mass(space_grid));
    return llt.solve(load);
}

Matrix SpaceTimeSystem::apply(const Matrix& coeffs) const {
    return space_mass * coeffs * time_advection.transpose() + space_stiffness * coeffs * time_mass.transpose();
}

double SpaceTimeSystem::residual_max(const Matrix& coeffs) const {
    if (coeffs.cols() < 2) return 0.0;
    const Matrix r = apply(coeffs) - rhs;
    return r.rightCols(r.cols() - 1).cwiseAbs().maxCoeff();
}

namespace {

double condition_1norm(const Matrix& a, const Eigen::PartialPivLU<Matrix>& lu) {
    const Matrix inv = lu.inverse();
    return a.cwiseAbs().colwise().sum().maxCoeff() * inv.cwiseAbs().colwise().sum().maxCoeff();
}

void check_shapes(const SpaceTimeSystem& sys) {
    const Index q = sys.space_mass.rows();
    const Index n = sys.time_mass.rows();
    if (sys.space_stiffness.rows() != q || sys.time_advection.rows() != n || sys.rhs.rows() != q ||
        sys.rhs.cols() != n || sys.initial.size() != q) {
        throw std::invalid_argument("inconsistent space-time system dimensions");
    }
}

Matrix solve_modal(const SpaceTimeSystem& sys, bool estimate_condition, double& condition) {
    const Index q = sys.space_mass.rows();
    const Index n = sys.time_mass.rows();
    Matrix x(q, n);
    x.col(0) = sys.initial;
    if (n == 1) return x;

    // move the known initial column to the right-hand side
    const Index m = n - 1;
    const Matrix d2 = sys.time_advection.bottomRightCorner(m, m);
    const Matrix m2 = sys.time_mass.bottomRightCorner(m, m);
    const Matrix reduced_rhs = sys.rhs.rightCols(m) -
                               (sys.space_mass * sys.initial) * sys.time_advection.col(0).tail(m).transpose() -
                               (sys.space_stiffness * sys.initial) * sys.time_mass.col(0).tail(m).transpose();

    // As W = Ms W Lambda with W^T Ms W = I decouples the spatial modes
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> ges(sys.space_stiffness, sys.space_mass);
    if (ges.info() != Eigen::Success) throw std::runtime_error("generalized eigenproblem in space failed");
    const Matrix& w = ges.eigenvectors();
    const Matrix modal_rhs = w.transpose() * reduced_rhs;

    Matrix z(q, m);
    condition = 0.0;
    for (Index i = 0; i < q; ++i) {
        const Matrix block = d2 + ges.eigenvalues()(i) * m2;
        Eigen::PartialPivLU<Matrix> lu(block);
        const double det_scale = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
        if (!(det_scale > 0.0) || !std::isfinite(det_scale)) {
            throw std::runtime_error("singular time system for spatial mode " + std::to_string(i));
        }
        z.row(i) = lu.solve(Vector(modal_rhs.row(i).transpose())).transpose();
        if (estimate_condition) condition = std::max(condition, condition_1norm(block, lu));
    }
    x.rightCols(m) = w * z;
    return x;
}

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i) {
        for (Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

Matrix solve_dense(const SpaceTimeSystem& sys, bool estimate_condition, double& condition) {
    const Index q = sys.space_mass.rows();
    const Index n = sys.time_mass.rows();
    if (q * n > 4096) throw std::invalid_argument("dense space-time solve limited to 4096 unknowns");
    Matrix op = kron(sys.time_advection, sys.space_mass) + kron(sys.time_mass, sys.space_stiffness);
    Vector rhs = sys.rhs.reshaped();
    op.topRows(q).setZero();
    op.topLeftCorner(q, q).setIdentity();
    rhs.head(q) = sys.initial;
    Eigen::PartialPivLU<Matrix> lu(op);
    if (!(lu.matrixLU().diagonal().cwiseAbs().minCoeff() > 0.0)) {
        throw std::runtime_error("singular dense space-time system");
    }
    condition = estimate_condition ? condition_1norm(op, lu) : 0.0;
    Vector sol = lu.solve(rhs);
    Matrix x = sol.reshaped(q, n);
    x.col(0) = sys.initial;
    return x;
}

}  // namespace

SolveResult solve_space_time(const SpaceTimeSystem& system, SolverKind kind, bool estimate_condition) {
    check_shapes(system);
    SolveResult out;
    out.coeffs = kind == SolverKind::Modal ? solve_modal(system, estimate_condition, out.condition_estimate)
                                           : solve_dense(system, estimate_condition, out.condition_estimate);
    if (!out.coeffs.allFinite()) throw std::runtime_error("space-time solve produced non-finite values");
    out.residual_max = system.residual_max(out.coeffs);
    return out;
}

SpaceTimeSystem assemble_fom(const ProblemSpec& problem, const GramianSet& g, const Grid1D& time_grid,
                             const Grid1D& space_grid, const FomOptions& options) {
    if (g.s() != time_grid.dim() || g.q() != space_grid.dim()) {
        throw std::invalid_argument("Gramians do not match the grids");
    }
    SpaceTimeSystem sys;
    sys.space_mass = g.space_mass;
    sys.space_stiffness = g.space_stiffness;
    sys.time_advection = g.time_advection;
    sys.time_mass = g.time_mass;
    sys.rhs = assemble_rhs(problem.forcing, time_grid, space_grid, options.quad_order, options.subdivision);
    sys.initial = project_initial(problem.initial, space_grid, std::max(options.quad_order, 5));
    return sys;
}

FomSolution solve_fom(const ProblemSpec& problem, const GramianSet& g, const Grid1D& time_grid,
                      const Grid1D& space_grid, const FomOptions& options) {
    SpaceTimeSystem sys = assemble_fom(problem, g, time_grid, space_grid, options);
    const SolveResult solved = solve_space_time(sys, options.solver, true);
    FomSolution out;
    out.field = CoefficientField(solved.coeffs, time_grid, space_grid);
    out.rhs = std::move(sys.rhs);
    out.initial = std::move(sys.initial);
    out.condition_estimate = solved.condition_estimate;
    out.residual_max = solved.residual_max;
    return out;
}

SpaceTimeSystem assemble_rom(const GramianSet& g, const SpaceReducedBasis& space_basis,
                             const TimeReducedBasisIC& time_basis, const Matrix& rhs, const Vector& initial) {
    const Matrix& ty = space_basis.transform;
    const Matrix& ts = time_basis.transform;
    if (ty.rows() != g.q() || ts.rows() != g.s() || rhs.rows() != g.q() || rhs.cols() != g.s() ||
        initial.size() != g.q()) {
        throw std::invalid_argument("reduced bases, right-hand side and Gramians disagree in size");
    }
    auto sym = [](const Matrix& m) -> Matrix { return 0.5 * (m + m.transpose()); };
    SpaceTimeSystem sys;
    sys.space_mass = sym(ty.transpose() * g.space_mass * ty);
    sys.space_stiffness = sym(ty.transpose() * g.space_stiffness * ty);
    sys.time_advection = ts.transpose() * g.time_advection * ts;
    sys.time_mass = sym(ts.transpose() * g.time_mass * ts);
    sys.rhs = ty.transpose() * rhs * ts;
    sys.initial = space_basis.v_hat.transpose() * (g.space_mass_factor.transpose() * initial);
    return sys;
}

Matrix lift_reduced(const Matrix& reduced, const SpaceReducedBasis& space_basis,
                    const TimeReducedBasisIC& time_basis) {
    return space_basis.transform * reduced * time_basis.transform.transpose();
}

RomSolution solve_rom(const SpaceTimeSystem& system, const SpaceReducedBasis& space_basis,
                      const TimeReducedBasisIC& time_basis, const Grid1D& time_grid, const Grid1D& space_grid) {
    const SolveResult solved = solve_space_time(system, SolverKind::Modal, true);
    RomSolution out;
    out.reduced = solved.coeffs;
    out.lifted = CoefficientField(lift_reduced(solved.coeffs, space_basis, time_basis), time_grid, space_grid);
    out.condition_estimate = solved.condition_estimate;
    out.ill_conditioned = solved.condition_estimate > kIllConditioned;
    return out;
}

double l2_error(const CoefficientField& field, const SpaceTimeFunction& exact, int quad_order) {
    const QuadratureRule rule = gauss_legendre(quad_order);
    const Grid1D& tg = field.time_grid();
    const Grid1D& sg = field.space_grid();
    double sum = 0.0;
    for (Index ct = 0; ct + 1 < tg.n_nodes(); ++ct) {
        for (Index cx = 0; cx + 1 < sg.n_nodes(); ++cx) {
            for (size_t a = 0; a < rule.points.size(); ++a) {
                const double tau = tg.node(ct) + 0.5 * (rule.points[a] + 1.0) * tg.h();
                for (size_t b = 0; b < rule.points.size(); ++b) {
                    const double xi = sg.node(cx) + 0.5 * (rule.points[b] + 1.0) * sg.h();
                    const double diff = evaluate(field, tau, xi) - exact(tau, xi);
                    sum += rule.weights[a] * rule.weights[b] * 0.25 * tg.h() * sg.h() * diff * diff;
                }
            }
        }
    }
    return std::sqrt(sum);
}

}  // namespace stpod
