#pragma once

#include <cstddef>
#include <vector>

namespace ekdiff {

// Nodes and weights of a quadrature rule on [-1, 1].
struct QuadRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Gauss-Jacobi rule of size n against the weight (1-x)^a (1+x)^b, a, b > -1:
// Golub-Welsch on the symmetric tridiagonal recurrence matrix.  Results are
// cached per (n, a, b); the returned reference stays valid for the process
// lifetime.
const QuadRule& gauss_jacobi(std::size_t n, double a, double b);

// Gauss-Legendre on [-1, 1] (the a = b = 0 special case, same cache).
const QuadRule& gauss_legendre(std::size_t n);

}  // namespace ekdiff
