#pragma once

#include "stpod/spacetime_field.hpp"

#include <iosfwd>
#include <string>

namespace stpod {

enum class ProjectionOrder { SpaceFirst, TimeFirst };

std::string to_string(ProjectionOrder order);

/// Full SVD  weighted = left * diag(sigma) * right^T  with nonincreasing sigma.
/// Each singular pair is sign-normalized so the largest-magnitude entry of the left vector is positive.
struct WeightedSVD {
    Matrix left;    // q x q
    Vector sigma;   // min(q, s)
    Matrix right;   // s x s
};

/// SVD of an arbitrary matrix with the sign convention above.
/// Throws std::runtime_error if the decomposition does not converge or yields non-finite values.
WeightedSVD svd_canonical(const Matrix& a);

/// SVD of L_Y^T X L_S.
WeightedSVD weighted_svd(const CoefficientField& field, const GramianSet& g);

/// Optimal q_hat-dimensional space basis: nu_hat = V_hat^T L_Y^{-1} nu.
struct SpaceReducedBasis {
    Matrix v_hat;      // q x q_hat, leading left singular vectors
    Matrix transform;  // q x q_hat, L_Y^{-T} V_hat; column k = nodal coefficients of nu_hat_k
    Vector sigma;      // all singular values of the source matrix
    Index q_hat = 0;
};

/// Time basis whose first function is the t = 0 hat function.
/// U_hat = [ (L_S^T)(:,0) | U_ring ], U_ring the s_hat-1 leading right singular vectors of L_Y^T X_ring L_S.
struct TimeReducedBasisIC {
    Matrix u_hat;         // s x s_hat
    Matrix transform;     // s x s_hat, L_S^{-T} U_hat; column k = nodal coefficients of psi_hat_k
    Matrix reduced_mass;  // U_hat^T U_hat, not the identity in general
    Vector sigma_ic;      // singular values of L_Y^T X_ring L_S, length min(q, s)
    Index s_hat = 0;

    bool degenerate() const { return s_hat == 1; }
    /// Orthonormal columns 2..s_hat of U_hat.
    Matrix u_ring() const { return u_hat.rightCols(s_hat - 1); }
};

/// Throws std::invalid_argument unless 1 <= q_hat <= q.
SpaceReducedBasis reduce_space(const CoefficientField& field, const GramianSet& g, Index q_hat);

/// Throws std::invalid_argument unless 1 <= s_hat <= s. s_hat == 1 yields the IC-only basis.
TimeReducedBasisIC reduce_time_ic(const CoefficientField& field, const GramianSet& g, Index s_hat);

/// Coefficients of Pi_{S*Y_hat} x = L_Y^{-T} V_hat V_hat^T L_Y^T X.
CoefficientField project_space(const CoefficientField& field, const SpaceReducedBasis& basis,
                               const GramianSet& g);

/// First column kept, remainder X_ring L_S U_ring U_ring^T L_S^{-1}.
CoefficientField project_time_ic(const CoefficientField& field, const TimeReducedBasisIC& basis,
                                 const GramianSet& g);

struct CompositeProjection {
    CoefficientField projected;     // P x
    CoefficientField intermediate;  // Pi_{S*Y_hat} x (SpaceFirst) or Pi_{S_hat*Y} x (TimeFirst)
    SpaceReducedBasis space_basis;
    TimeReducedBasisIC time_basis;
    ProjectionOrder order = ProjectionOrder::SpaceFirst;
};

/// SpaceFirst: time basis built from the space-projected field. TimeFirst: space basis built
/// from the time-projected field.
CompositeProjection project_composite(const CoefficientField& field, ProjectionOrder order, Index q_hat,
                                      Index s_hat, const GramianSet& g);

/// Applies an already computed pair of bases in the given order.
CoefficientField apply_composite(const CoefficientField& field, ProjectionOrder order,
                                 const SpaceReducedBasis& space_basis, const TimeReducedBasisIC& time_basis,
                                 const GramianSet& g);

// Basis dumps: a JSON header line {kind, q_hat|s_hat, grid}, a column header, then one row per
// grid node holding the nodal values of every reduced basis function.
void write_space_basis_csv(std::ostream& os, const SpaceReducedBasis& basis, const Grid1D& space_grid);
void write_time_basis_csv(std::ostream& os, const TimeReducedBasisIC& basis, const Grid1D& time_grid);

struct BasisDump {
    std::string kind;
    Index dimension = 0;
    Vector nodes;
    Matrix values;  // n_nodes x dimension
};
BasisDump read_basis_csv(std::istream& is);

}  // namespace stpod
