#pragma once

#include <span>
#include <vector>

#include "honeyhsi/matrix.hpp"

namespace honeyhsi {

struct EigenResult {
    std::vector<double> eigenvalues;  ///< descending
    Matrix eigenvectors;              ///< column k pairs with eigenvalues[k], unit norm
};

/// Throws ShapeError when a.cols() != b.rows().
Matrix matmul(const Matrix& a, const Matrix& b);

/// aᵀ·x for a vector x of length a.rows().
std::vector<double> multiplyTransposed(const Matrix& a, std::span<const double> x);

/// Lower-triangular L with L·Lᵀ = a. Throws NotPositiveDefiniteError on a non-positive pivot.
Matrix cholesky(const Matrix& a);

/// Forward substitution for l·x = b (b may hold several right-hand-side columns).
Matrix solveLowerTriangular(const Matrix& l, const Matrix& b);

/// Back substitution for lᵀ·x = b, reading only the lower triangle of l.
Matrix solveLowerTriangularTransposed(const Matrix& l, const Matrix& b);

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
///
/// Sweeps continue until the off-diagonal Frobenius norm drops below 1e-12·‖a‖_F.
/// Throws ShapeError if a is not square or its asymmetry exceeds 1e-8 relative to ‖a‖_F.
EigenResult eigSymmetric(const Matrix& a);

}  // namespace honeyhsi
