#pragma once

#include "stpod/grid_fem.hpp"

#include <filesystem>
#include <iosfwd>

namespace stpod {

/// A function in S*Y stored by its q x s coefficient matrix.
/// coeffs(i, j) multiplies nu_i(xi) * psi_j(tau); vec() stacks columns (time-major blocks).
class CoefficientField {
public:
    CoefficientField() = default;
    /// Throws std::invalid_argument if the matrix shape does not match the grids.
    CoefficientField(Matrix coeffs, Grid1D time_grid, Grid1D space_grid);

    static CoefficientField zeros(const Grid1D& time_grid, const Grid1D& space_grid);

    const Matrix& coeffs() const { return coeffs_; }
    const Grid1D& time_grid() const { return time_grid_; }
    const Grid1D& space_grid() const { return space_grid_; }
    Index q() const { return coeffs_.rows(); }
    Index s() const { return coeffs_.cols(); }

    /// Same grids, new coefficients.
    CoefficientField with_coeffs(Matrix coeffs) const;

    Vector vec() const { return coeffs_.reshaped(); }

private:
    Matrix coeffs_;
    Grid1D time_grid_;
    Grid1D space_grid_;
};

CoefficientField operator-(const CoefficientField& lhs, const CoefficientField& rhs);
CoefficientField operator+(const CoefficientField& lhs, const CoefficientField& rhs);

/// L_Y^T X L_S, the matrix whose Frobenius norm is the S*Y norm.
Matrix weighted_coeffs(const Matrix& coeffs, const GramianSet& g);

/// ||x||_{S*Y} = ||L_Y^T X L_S||_F
double sty_norm(const CoefficientField& field, const GramianSet& g);

/// ||x_t||_{S*Y} = ||L_Y^T X J_S||_F
double sty_dt_norm(const CoefficientField& field, const GramianSet& g);

/// (x1, x2)_{S*Y}
double sty_inner(const CoefficientField& lhs, const CoefficientField& rhs, const GramianSet& g);

/// Point value of the P1 x P1 expansion. Throws std::out_of_range outside [0,T] x closure(Omega).
double evaluate(const CoefficientField& field, double tau, double xi);

/// Copy of `field` with the first (t = 0) coefficient column set to zero.
CoefficientField zero_first_column(const CoefficientField& field);

// CSV format: one header row of key=value pairs (q, s, grid metadata) followed by
// q rows of s comma-separated values, 17 significant digits.
void write_field_csv(std::ostream& os, const CoefficientField& field);
CoefficientField read_field_csv(std::istream& is);
void save_field_csv(const std::filesystem::path& path, const CoefficientField& field);
CoefficientField load_field_csv(const std::filesystem::path& path);

}  // namespace stpod
