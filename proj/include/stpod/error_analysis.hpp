#pragma once

#include "stpod/galerkin_solver.hpp"

#include <string>
#include <vector>

namespace stpod {

/// Sigma_{Yhat->Shat} (space-first) or Sigma_{Shat->Yhat} (time-first).
struct SigmaBound {
    ProjectionOrder order = ProjectionOrder::SpaceFirst;
    Index q_hat = 0;
    Index s_hat = 0;
    double space_tail = 0.0;  // sqrt(sum_{i > q_hat} sigma_i^2)
    double time_tail = 0.0;   // sqrt(sum_{j >= s_hat} sigma_ring_j^2)
    double total = 0.0;
    Vector sigma_full;  // space-first: L_Y^T X L_S; time-first: L_Y^T X_{Shat*Y} L_S
    Vector sigma_ic;    // space-first: L_Y^T X_ring_{S*Yhat} L_S; time-first: L_Y^T X_ring L_S

    /// Leading singular value used as the scale for vanishing thresholds.
    double scale() const { return sigma_full.size() > 0 ? sigma_full(0) : 0.0; }
};

/// sqrt of the sum of squares of sigma from 0-based index `first` on (0 past the end).
double tail_norm(const Vector& sigma, Index first);

/// Bound from the singular values carried by an already computed composite projection.
SigmaBound sigma_bound(const CompositeProjection& projection);
SigmaBound sigma_bound(const CoefficientField& fom, ProjectionOrder order, Index q_hat, Index s_hat,
                       const GramianSet& g);

/// ||L_S^{-1} J_S||_F evaluated as sqrt(trace(L_S^{-1} K_S L_S^{-T})).
double c_rho_t(const GramianSet& g);
/// Same constant through the stored factor J_S.
double c_rho_t_from_factor(const GramianSet& g);

struct RhoErrors {
    double rho = 0.0;
    double rho_t = 0.0;
};
RhoErrors rho_errors(const CoefficientField& fom, const CoefficientField& projected, const GramianSet& g);

struct ThetaTotal {
    double theta = 0.0;
    double total = 0.0;
};
ThetaTotal theta_and_total(const CoefficientField& fom, const CoefficientField& projected,
                           const CoefficientField& rom_lifted, const GramianSet& g);

/// ||Pi_Y x0 - Pi_Yhat Pi_Y x0||_{L2(Omega)} for the FOM initial coefficients.
double ic_gap(const Vector& initial, const SpaceReducedBasis& space_basis, const GramianSet& g);

struct ReportFlags {
    bool has_rom = false;
    bool ill_conditioned = false;  // ROM condition estimate above kIllConditioned
    bool degenerate = false;       // s_hat == 1
    bool sigma_floor = false;      // Sigma below kSigmaFloor * sigma_1, effective_C not formed
    double rom_condition = 0.0;

    /// "none" or '|'-joined flag names.
    std::string to_string() const;
};

/// Points with Sigma < kSigmaFloor * sigma_1 carry no effective constant.
inline constexpr double kSigmaFloor = 1e-13;

struct ErrorReport {
    ProjectionOrder order = ProjectionOrder::SpaceFirst;
    Index q_hat = 0;
    Index s_hat = 0;
    double rho = 0.0;
    double rho_t = 0.0;
    double theta = 0.0;  // NaN without ROM
    double total = 0.0;  // NaN without ROM
    SigmaBound sigma;
    double c_rho_t = 0.0;
    double effective_C = 0.0;  // NaN when not formed
    double ic_gap = 0.0;
    ReportFlags flags;
};

/// Assembles a report; `rom` may be null for a projection-only report.
ErrorReport make_report(const CoefficientField& fom, const CompositeProjection& projection, const RomSolution* rom,
                        const Vector& fom_initial, const GramianSet& g, double c_rho_t_value);

struct Tolerances {
    double relative = 1e-9;
    /// Absolute allowance as a multiple of sigma_1 (rounding floor once Sigma reaches machine zero).
    double absolute = 1e-12;
};

struct CheckResult {
    std::string name;
    bool evaluated = false;
    bool passed = false;
    double lhs = 0.0;
    double rhs = 0.0;
};

/// rho <= Sigma, rho_t <= C_rho_t Sigma (hard) and finiteness of effective_C (skipped without ROM).
std::vector<CheckResult> verify_bounds(const ErrorReport& report, const Tolerances& tol = {});

/// True if every evaluated hard check passed (the effective_C entry is not a hard check).
bool hard_checks_pass(const std::vector<CheckResult>& checks);

struct StabilityResult {
    Index used = 0;  // sweep points entering the statistic
    double min_c = 0.0;
    double max_c = 0.0;
    double ratio = 0.0;
    bool passed = true;
};

/// max/min of effective_C over flagged-free sweep points, compared with `factor`.
StabilityResult effective_c_stability(const std::vector<ErrorReport>& reports, double factor);

std::string report_csv_header();
std::string report_csv_row(const ErrorReport& report);

}  // namespace stpod
