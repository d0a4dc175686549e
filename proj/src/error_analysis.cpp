#include "stpod/error_analysis.hpp"

#include "stpod/csv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace stpod {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_same_grids(const CoefficientField& a, const CoefficientField& b) {
    if (a.time_grid() != b.time_grid() || a.space_grid() != b.space_grid()) {
        throw std::invalid_argument("fields live on different grids");
    }
}

}  // namespace

double tail_norm(const Vector& sigma, Index first) {
    if (first >= sigma.size()) return 0.0;
    first = std::max<Index>(first, 0);
    return sigma.tail(sigma.size() - first).norm();
}

SigmaBound sigma_bound(const CompositeProjection& projection) {
    SigmaBound out;
    out.order = projection.order;
    out.q_hat = projection.space_basis.q_hat;
    out.s_hat = projection.time_basis.s_hat;
    out.sigma_full = projection.space_basis.sigma;
    out.sigma_ic = projection.time_basis.sigma_ic;
    out.space_tail = tail_norm(out.sigma_full, out.q_hat);
    out.time_tail = tail_norm(out.sigma_ic, out.s_hat - 1);
    out.total = out.space_tail + out.time_tail;
    return out;
}

SigmaBound sigma_bound(const CoefficientField& fom, ProjectionOrder order, Index q_hat, Index s_hat,
                       const GramianSet& g) {
    if (fom.q() != g.q() || fom.s() != g.s()) throw std::invalid_argument("field does not match Gramians");
    return sigma_bound(project_composite(fom, order, q_hat, s_hat, g));
}

double c_rho_t(const GramianSet& g) {
    const auto ls = g.time_mass_factor.triangularView<Eigen::Lower>();
    const Matrix left = ls.solve(g.time_stiffness);          // L_S^{-1} K_S
    const Matrix both = ls.solve(Matrix(left.transpose()));  // L_S^{-1} K_S L_S^{-T}
    return std::sqrt(std::max(0.0, both.trace()));
}

double c_rho_t_from_factor(const GramianSet& g) {
    return g.time_mass_factor.triangularView<Eigen::Lower>().solve(g.time_stiffness_factor).norm();
}

RhoErrors rho_errors(const CoefficientField& fom, const CoefficientField& projected, const GramianSet& g) {
    require_same_grids(fom, projected);
    const CoefficientField diff = fom - projected;
    return {sty_norm(diff, g), sty_dt_norm(diff, g)};
}

ThetaTotal theta_and_total(const CoefficientField& fom, const CoefficientField& projected,
                           const CoefficientField& rom_lifted, const GramianSet& g) {
    require_same_grids(fom, projected);
    require_same_grids(fom, rom_lifted);
    return {sty_norm(projected - rom_lifted, g), sty_norm(fom - rom_lifted, g)};
}

double ic_gap(const Vector& initial, const SpaceReducedBasis& space_basis, const GramianSet& g) {
    const Vector w = g.space_mass_factor.transpose() * initial;
    return (w - space_basis.v_hat * (space_basis.v_hat.transpose() * w)).norm();
}

std::string ReportFlags::to_string() const {
    std::string out;
    auto add = [&out](const char* name) {
        if (!out.empty()) out += '|';
        out += name;
    };
    if (!has_rom) add("no_rom");
    if (ill_conditioned) add("ill_conditioned");
    if (degenerate) add("degenerate");
    if (sigma_floor) add("sigma_floor");
    return out.empty() ? "none" : out;
}

ErrorReport make_report(const CoefficientField& fom, const CompositeProjection& projection, const RomSolution* rom,
                        const Vector& fom_initial, const GramianSet& g, double c_rho_t_value) {
    ErrorReport r;
    r.order = projection.order;
    r.q_hat = projection.space_basis.q_hat;
    r.s_hat = projection.time_basis.s_hat;
    r.sigma = sigma_bound(projection);
    const RhoErrors rho = rho_errors(fom, projection.projected, g);
    r.rho = rho.rho;
    r.rho_t = rho.rho_t;
    r.c_rho_t = c_rho_t_value;
    r.ic_gap = ic_gap(fom_initial, projection.space_basis, g);
    r.flags.degenerate = projection.time_basis.degenerate();
    r.flags.sigma_floor = r.sigma.total < kSigmaFloor * r.sigma.scale();
    r.theta = kNaN;
    r.total = kNaN;
    r.effective_C = kNaN;
    if (rom != nullptr) {
        const ThetaTotal tt = theta_and_total(fom, projection.projected, rom->lifted, g);
        r.theta = tt.theta;
        r.total = tt.total;
        r.flags.has_rom = true;
        r.flags.ill_conditioned = rom->ill_conditioned;
        r.flags.rom_condition = rom->condition_estimate;
        if (!r.flags.sigma_floor) r.effective_C = r.total / r.sigma.total;
    }
    return r;
}

std::vector<CheckResult> verify_bounds(const ErrorReport& report, const Tolerances& tol) {
    const double floor = tol.absolute * report.sigma.scale();
    const double sigma = report.sigma.total;
    std::vector<CheckResult> out;

    CheckResult rho{"rho<=sigma", true, false, report.rho, sigma};
    rho.passed = report.rho <= sigma * (1.0 + tol.relative) + floor;
    out.push_back(rho);

    CheckResult rho_t{"rho_t<=c_rho_t*sigma", true, false, report.rho_t, report.c_rho_t * sigma};
    rho_t.passed = report.rho_t <= rho_t.rhs * (1.0 + tol.relative) + report.c_rho_t * floor;
    out.push_back(rho_t);

    CheckResult eff{"effective_C_finite", false, true, report.effective_C, 0.0};
    if (report.flags.has_rom && !report.flags.sigma_floor) {
        eff.evaluated = true;
        eff.passed = std::isfinite(report.effective_C);
    }
    out.push_back(eff);
    return out;
}

bool hard_checks_pass(const std::vector<CheckResult>& checks) {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) {
        return !c.evaluated || c.passed || c.name == "effective_C_finite";
    });
}

StabilityResult effective_c_stability(const std::vector<ErrorReport>& reports, double factor) {
    StabilityResult out;
    out.min_c = std::numeric_limits<double>::infinity();
    out.max_c = 0.0;
    for (const ErrorReport& r : reports) {
        if (!r.flags.has_rom || r.flags.ill_conditioned || r.flags.degenerate || r.flags.sigma_floor) continue;
        if (!std::isfinite(r.effective_C) || r.effective_C <= 0.0) continue;
        out.min_c = std::min(out.min_c, r.effective_C);
        out.max_c = std::max(out.max_c, r.effective_C);
        ++out.used;
    }
    if (out.used == 0) {
        out.min_c = out.max_c = out.ratio = kNaN;
        return out;
    }
    out.ratio = out.max_c / out.min_c;
    out.passed = out.ratio <= factor;
    return out;
}

std::string report_csv_header() {
    return "order,q_hat,s_hat,rho,rho_t,theta,total,sigma_space_tail,sigma_time_tail,sigma_total,c_rho_t,"
           "effective_C,ic_gap,flags";
}

std::string report_csv_row(const ErrorReport& r) {
    using csv::fmt;
    std::string row = to_string(r.order);
    row += ',' + std::to_string(r.q_hat) + ',' + std::to_string(r.s_hat);
    for (double v : {r.rho, r.rho_t, r.theta, r.total, r.sigma.space_tail, r.sigma.time_tail, r.sigma.total,
                     r.c_rho_t, r.effective_C, r.ic_gap}) {
        row += ',' + fmt(v);
    }
    row += ',' + r.flags.to_string();
    return row;
}

}  // namespace stpod
