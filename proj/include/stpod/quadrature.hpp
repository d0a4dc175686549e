#pragma once

#include <vector>

namespace stpod {

struct QuadratureRule {
    std::vector<double> points;   // on [-1, 1]
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule (exact for polynomials of degree 2n-1).
QuadratureRule gauss_legendre(int n);

}  // namespace stpod
