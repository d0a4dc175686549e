#include "stpod/spacetime_field.hpp"

#include "stpod/csv.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>

namespace stpod {

CoefficientField::CoefficientField(Matrix coeffs, Grid1D time_grid, Grid1D space_grid)
    : coeffs_(std::move(coeffs)), time_grid_(time_grid), space_grid_(space_grid) {
    if (coeffs_.rows() != space_grid_.dim() || coeffs_.cols() != time_grid_.dim()) {
        throw std::invalid_argument("coefficient matrix is " + std::to_string(coeffs_.rows()) + "x" +
                                    std::to_string(coeffs_.cols()) + ", grids expect " +
                                    std::to_string(space_grid_.dim()) + "x" +
                                    std::to_string(time_grid_.dim()));
    }
}

CoefficientField CoefficientField::zeros(const Grid1D& time_grid, const Grid1D& space_grid) {
    return {Matrix::Zero(space_grid.dim(), time_grid.dim()), time_grid, space_grid};
}

CoefficientField CoefficientField::with_coeffs(Matrix coeffs) const {
    return {std::move(coeffs), time_grid_, space_grid_};
}

namespace {

void require_same_grids(const CoefficientField& lhs, const CoefficientField& rhs) {
    if (!(lhs.time_grid() == rhs.time_grid()) || !(lhs.space_grid() == rhs.space_grid())) {
        throw std::invalid_argument("fields live on different grids");
    }
}

void require_matches(const Matrix& coeffs, const GramianSet& g) {
    if (coeffs.rows() != g.q() || coeffs.cols() != g.s()) {
        throw std::invalid_argument("field dimensions do not match the Gramians");
    }
}

}  // namespace

CoefficientField operator-(const CoefficientField& lhs, const CoefficientField& rhs) {
    require_same_grids(lhs, rhs);
    return lhs.with_coeffs(lhs.coeffs() - rhs.coeffs());
}

CoefficientField operator+(const CoefficientField& lhs, const CoefficientField& rhs) {
    require_same_grids(lhs, rhs);
    return lhs.with_coeffs(lhs.coeffs() + rhs.coeffs());
}

Matrix weighted_coeffs(const Matrix& coeffs, const GramianSet& g) {
    require_matches(coeffs, g);
    return g.space_mass_factor.transpose().triangularView<Eigen::Upper>() *
           (coeffs * g.time_mass_factor.triangularView<Eigen::Lower>());
}

double sty_norm(const CoefficientField& field, const GramianSet& g) {
    return weighted_coeffs(field.coeffs(), g).norm();
}

double sty_dt_norm(const CoefficientField& field, const GramianSet& g) {
    require_matches(field.coeffs(), g);
    return (g.space_mass_factor.transpose() * field.coeffs() * g.time_stiffness_factor).norm();
}

double sty_inner(const CoefficientField& lhs, const CoefficientField& rhs, const GramianSet& g) {
    require_same_grids(lhs, rhs);
    return (weighted_coeffs(lhs.coeffs(), g).array() * weighted_coeffs(rhs.coeffs(), g).array()).sum();
}

double evaluate(const CoefficientField& field, double tau, double xi) {
    const Grid1D& tg = field.time_grid();
    const Grid1D& sg = field.space_grid();
    if (tau < tg.a() || tau > tg.b() || xi < sg.a() || xi > sg.b()) {
        throw std::out_of_range("evaluation point outside the space-time domain");
    }
    const Index ct = tg.cell_of(tau);
    const Index cx = sg.cell_of(xi);
    // local coordinates, snapped so that nodes reproduce nodal values exactly
    auto local = [](double w) {
        w = std::clamp(w, 0.0, 1.0);
        if (w < 1e-13) return 0.0;
        if (w > 1.0 - 1e-13) return 1.0;
        return w;
    };
    const double wt = local((tau - tg.node(ct)) / tg.h());
    const double wx = local((xi - sg.node(cx)) / sg.h());

    // node index -> coefficient row/column, or nothing for a Dirichlet boundary node
    auto row_of = [&](Index node) -> Index {
        if (sg.boundary_mode() == BoundaryMode::AllNodes) return node;
        return (node == 0 || node == sg.n_nodes() - 1) ? -1 : node - 1;
    };
    auto col_of = [&](Index node) -> Index {
        if (tg.boundary_mode() == BoundaryMode::AllNodes) return node;
        return (node == 0 || node == tg.n_nodes() - 1) ? -1 : node - 1;
    };

    double value = 0.0;
    for (int dt = 0; dt < 2; ++dt) {
        const Index j = col_of(ct + dt);
        if (j < 0) continue;
        const double bt = dt == 0 ? 1.0 - wt : wt;
        for (int dx = 0; dx < 2; ++dx) {
            const Index i = row_of(cx + dx);
            if (i < 0) continue;
            const double bx = dx == 0 ? 1.0 - wx : wx;
            value += field.coeffs()(i, j) * bt * bx;
        }
    }
    return value;
}

CoefficientField zero_first_column(const CoefficientField& field) {
    Matrix coeffs = field.coeffs();
    coeffs.col(0).setZero();
    return field.with_coeffs(std::move(coeffs));
}

namespace {

const char* mode_name(BoundaryMode mode) {
    return mode == BoundaryMode::AllNodes ? "all" : "dirichlet";
}

BoundaryMode parse_mode(const std::string& name) {
    if (name == "all") return BoundaryMode::AllNodes;
    if (name == "dirichlet") return BoundaryMode::ZeroDirichlet;
    throw std::runtime_error("unknown boundary mode '" + name + "' in field CSV");
}

}  // namespace

void write_field_csv(std::ostream& os, const CoefficientField& field) {
    const Grid1D& tg = field.time_grid();
    const Grid1D& sg = field.space_grid();
    os << "q=" << field.q() << ",s=" << field.s() << ",time_a=" << csv::fmt(tg.a())
       << ",time_b=" << csv::fmt(tg.b()) << ",time_nodes=" << tg.n_nodes()
       << ",time_mode=" << mode_name(tg.boundary_mode()) << ",space_a=" << csv::fmt(sg.a())
       << ",space_b=" << csv::fmt(sg.b()) << ",space_nodes=" << sg.n_nodes()
       << ",space_mode=" << mode_name(sg.boundary_mode()) << '\n';
    for (Index i = 0; i < field.q(); ++i) {
        for (Index j = 0; j < field.s(); ++j) {
            if (j > 0) os << ',';
            os << csv::fmt(field.coeffs()(i, j));
        }
        os << '\n';
    }
}

CoefficientField read_field_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("field CSV is empty");
    const auto header = csv::parse_pairs(line);
    auto get = [&](const std::string& key) {
        const auto it = header.find(key);
        if (it == header.end()) throw std::runtime_error("field CSV header lacks '" + key + "'");
        return it->second;
    };
    const Grid1D tg = build_uniform_grid(std::stod(get("time_a")), std::stod(get("time_b")),
                                         std::stol(get("time_nodes")), parse_mode(get("time_mode")));
    const Grid1D sg = build_uniform_grid(std::stod(get("space_a")), std::stod(get("space_b")),
                                         std::stol(get("space_nodes")), parse_mode(get("space_mode")));
    const Index q = std::stol(get("q"));
    const Index s = std::stol(get("s"));
    Matrix coeffs(q, s);
    for (Index i = 0; i < q; ++i) {
        if (!std::getline(is, line)) throw std::runtime_error("field CSV truncated");
        const auto cells = csv::split(line);
        if (static_cast<Index>(cells.size()) != s) throw std::runtime_error("field CSV row has wrong width");
        for (Index j = 0; j < s; ++j) coeffs(i, j) = std::stod(cells[static_cast<size_t>(j)]);
    }
    return {std::move(coeffs), tg, sg};
}

void save_field_csv(const std::filesystem::path& path, const CoefficientField& field) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_field_csv(os, field);
    if (!os) throw std::runtime_error("failed writing " + path.string());
}

CoefficientField load_field_csv(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path.string());
    return read_field_csv(is);
}

}  // namespace stpod
