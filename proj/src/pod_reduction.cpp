#include "stpod/pod_reduction.hpp"

#include "stpod/csv.hpp"

#include <json.hpp>

#include <cmath>
#include <istream>
#include <ostream>

namespace stpod {

std::string to_string(ProjectionOrder order) {
    return order == ProjectionOrder::SpaceFirst ? "space-first" : "time-first";
}

namespace {

// Index of the largest-magnitude entry; first one wins on ties.
Index argmax_abs(const Eigen::Ref<const Vector>& v) {
    Index best = 0;
    for (Index k = 1; k < v.size(); ++k) {
        if (std::abs(v(k)) > std::abs(v(best))) best = k;
    }
    return best;
}

void canonicalize_columns(Matrix& m) {
    for (Index k = 0; k < m.cols(); ++k) {
        if (m.rows() > 0 && m(argmax_abs(m.col(k)), k) < 0.0) m.col(k) *= -1.0;
    }
}

Matrix solve_upper_from_lower(const Matrix& lower, const Matrix& rhs) {
    // lower^{-T} rhs
    return lower.transpose().triangularView<Eigen::Upper>().solve(rhs);
}

}  // namespace

WeightedSVD svd_canonical(const Matrix& a) {
    Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    if (svd.info() != Eigen::Success || !svd.singularValues().allFinite()) {
        throw std::runtime_error("SVD did not converge");
    }
    WeightedSVD out{svd.matrixU(), svd.singularValues(), svd.matrixV()};
    const Index r = out.sigma.size();
    for (Index k = 0; k < r; ++k) {
        if (out.left(argmax_abs(out.left.col(k)), k) < 0.0) {
            out.left.col(k) *= -1.0;
            out.right.col(k) *= -1.0;
        }
    }
    // vectors without a singular partner are normalized on their own
    for (Index k = r; k < out.left.cols(); ++k) {
        if (out.left(argmax_abs(out.left.col(k)), k) < 0.0) out.left.col(k) *= -1.0;
    }
    for (Index k = r; k < out.right.cols(); ++k) {
        if (out.right(argmax_abs(out.right.col(k)), k) < 0.0) out.right.col(k) *= -1.0;
    }
    return out;
}

WeightedSVD weighted_svd(const CoefficientField& field, const GramianSet& g) {
    return svd_canonical(weighted_coeffs(field.coeffs(), g));
}

SpaceReducedBasis reduce_space(const CoefficientField& field, const GramianSet& g, Index q_hat) {
    if (q_hat < 1 || q_hat > field.q()) {
        throw std::invalid_argument("q_hat = " + std::to_string(q_hat) + " outside [1, " +
                                    std::to_string(field.q()) + "]");
    }
    const WeightedSVD svd = weighted_svd(field, g);
    SpaceReducedBasis basis;
    basis.q_hat = q_hat;
    basis.v_hat = svd.left.leftCols(q_hat);
    basis.transform = solve_upper_from_lower(g.space_mass_factor, basis.v_hat);
    basis.sigma = svd.sigma;
    return basis;
}

TimeReducedBasisIC reduce_time_ic(const CoefficientField& field, const GramianSet& g, Index s_hat) {
    const Index s = field.s();
    const Index q = field.q();
    if (s_hat < 1 || s_hat > s) {
        throw std::invalid_argument("s_hat = " + std::to_string(s_hat) + " outside [1, " + std::to_string(s) +
                                    "]");
    }
    const Matrix& ls = g.time_mass_factor;
    const Matrix weighted = weighted_coeffs(zero_first_column(field).coeffs(), g);

    // L_S^{-1} e_1 spans a null direction of the weighted matrix (its first coefficient column is
    // zero). Decomposing in the orthogonal complement keeps every right singular vector, including
    // those of zero singular values, orthogonal to it, which is what makes psi_hat_j(0) = 0 for j > 1.
    Vector z = ls.triangularView<Eigen::Lower>().solve(Vector::Unit(s, 0));
    Eigen::HouseholderQR<Matrix> qr(Matrix(z / z.norm()));
    const Matrix complement = (qr.householderQ() * Matrix::Identity(s, s)).rightCols(s - 1);

    TimeReducedBasisIC basis;
    basis.s_hat = s_hat;
    basis.sigma_ic = Vector::Zero(std::min(q, s));
    Matrix u_ring(s, s_hat - 1);
    if (s > 1) {
        const WeightedSVD svd = svd_canonical(weighted * complement);
        basis.sigma_ic.head(svd.sigma.size()) = svd.sigma;
        u_ring = complement * svd.right.leftCols(s_hat - 1);
        canonicalize_columns(u_ring);
    }

    basis.u_hat.resize(s, s_hat);
    basis.u_hat.col(0) = ls.row(0).transpose();
    basis.u_hat.rightCols(s_hat - 1) = u_ring;
    basis.transform = solve_upper_from_lower(ls, basis.u_hat);
    basis.reduced_mass = basis.u_hat.transpose() * basis.u_hat;
    return basis;
}

CoefficientField project_space(const CoefficientField& field, const SpaceReducedBasis& basis,
                               const GramianSet& g) {
    if (field.q() != basis.v_hat.rows()) throw std::invalid_argument("space basis does not match field");
    const Matrix& ly = g.space_mass_factor;
    Matrix reduced = basis.v_hat.transpose() * (ly.transpose() * field.coeffs());
    return field.with_coeffs(basis.transform * reduced);
}

CoefficientField project_time_ic(const CoefficientField& field, const TimeReducedBasisIC& basis,
                                 const GramianSet& g) {
    if (field.s() != basis.u_hat.rows()) throw std::invalid_argument("time basis does not match field");
    const Matrix& ls = g.time_mass_factor;
    Matrix ring = field.coeffs();
    ring.col(0).setZero();
    Matrix out = Matrix::Zero(field.q(), field.s());
    if (basis.s_hat > 1) {
        const Matrix u_ring = basis.u_ring();
        const Matrix right = (ring * ls.triangularView<Eigen::Lower>()) * u_ring * u_ring.transpose();
        // right * L_S^{-1}
        out = ls.transpose().triangularView<Eigen::Upper>().solve(right.transpose()).transpose();
    }
    out.col(0) = field.coeffs().col(0);
    return field.with_coeffs(std::move(out));
}

CoefficientField apply_composite(const CoefficientField& field, ProjectionOrder order,
                                 const SpaceReducedBasis& space_basis, const TimeReducedBasisIC& time_basis,
                                 const GramianSet& g) {
    if (order == ProjectionOrder::SpaceFirst) {
        return project_time_ic(project_space(field, space_basis, g), time_basis, g);
    }
    return project_space(project_time_ic(field, time_basis, g), space_basis, g);
}

CompositeProjection project_composite(const CoefficientField& field, ProjectionOrder order, Index q_hat,
                                      Index s_hat, const GramianSet& g) {
    CompositeProjection out;
    out.order = order;
    if (order == ProjectionOrder::SpaceFirst) {
        out.space_basis = reduce_space(field, g, q_hat);
        out.intermediate = project_space(field, out.space_basis, g);
        out.time_basis = reduce_time_ic(out.intermediate, g, s_hat);
        out.projected = project_time_ic(out.intermediate, out.time_basis, g);
    } else {
        out.time_basis = reduce_time_ic(field, g, s_hat);
        out.intermediate = project_time_ic(field, out.time_basis, g);
        out.space_basis = reduce_space(out.intermediate, g, q_hat);
        out.projected = project_space(out.intermediate, out.space_basis, g);
    }
    return out;
}

namespace {

nlohmann::json grid_json(const Grid1D& grid) {
    return {{"a", grid.a()},
            {"b", grid.b()},
            {"nodes", grid.n_nodes()},
            {"boundary", grid.boundary_mode() == BoundaryMode::AllNodes ? "all" : "dirichlet"}};
}

void write_nodal_table(std::ostream& os, const Grid1D& grid, const Matrix& transform, const char* coord,
                       const char* prefix) {
    os << coord;
    for (Index k = 0; k < transform.cols(); ++k) os << ',' << prefix << (k + 1);
    os << '\n';
    for (Index node = 0; node < grid.n_nodes(); ++node) {
        os << csv::fmt(grid.node(node));
        Index row = node;
        if (grid.boundary_mode() == BoundaryMode::ZeroDirichlet) {
            row = (node == 0 || node == grid.n_nodes() - 1) ? -1 : node - 1;
        }
        for (Index k = 0; k < transform.cols(); ++k) {
            os << ',' << csv::fmt(row < 0 ? 0.0 : transform(row, k));
        }
        os << '\n';
    }
}

}  // namespace

void write_space_basis_csv(std::ostream& os, const SpaceReducedBasis& basis, const Grid1D& space_grid) {
    nlohmann::json header = {{"kind", "space"}, {"q_hat", basis.q_hat}, {"grid", grid_json(space_grid)}};
    os << header.dump() << '\n';
    write_nodal_table(os, space_grid, basis.transform, "xi", "nu_hat_");
}

void write_time_basis_csv(std::ostream& os, const TimeReducedBasisIC& basis, const Grid1D& time_grid) {
    nlohmann::json header = {{"kind", "time"}, {"s_hat", basis.s_hat}, {"grid", grid_json(time_grid)}};
    os << header.dump() << '\n';
    write_nodal_table(os, time_grid, basis.transform, "tau", "psi_hat_");
}

BasisDump read_basis_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("basis CSV is empty");
    const auto header = nlohmann::json::parse(line);
    BasisDump dump;
    dump.kind = header.at("kind").get<std::string>();
    dump.dimension = header.at(dump.kind == "space" ? "q_hat" : "s_hat").get<Index>();
    const auto n_nodes = header.at("grid").at("nodes").get<Index>();
    std::getline(is, line);  // column names
    dump.nodes.resize(n_nodes);
    dump.values.resize(n_nodes, dump.dimension);
    for (Index r = 0; r < n_nodes; ++r) {
        if (!std::getline(is, line)) throw std::runtime_error("basis CSV truncated");
        const auto cells = csv::split(line);
        if (static_cast<Index>(cells.size()) != dump.dimension + 1) {
            throw std::runtime_error("basis CSV row has wrong width");
        }
        dump.nodes(r) = std::stod(cells[0]);
        for (Index k = 0; k < dump.dimension; ++k) dump.values(r, k) = std::stod(cells[static_cast<size_t>(k + 1)]);
    }
    return dump;
}

}  // namespace stpod
