#pragma once

#include <cstddef>

#include "tomd/tensor.hpp"

namespace tomd::linalg {

// Singular values at or below this fraction of the largest are treated as
// zero by least_squares.
inline constexpr double kRankThreshold = 1e-12;

// Minimum-Frobenius-norm minimizer of ||B - A X||_F.
Matrix least_squares(const Matrix& a, const Matrix& b);

// Minimum-norm minimizer of ||B - X A||_F, i.e. B * pinv(A).
Matrix least_squares_right(const Matrix& a, const Matrix& b);

struct SvdResult {
  Matrix u;  // m x r
  Vector s;  // r, nonincreasing
  Matrix v;  // n x r
};

// Leading r singular triplets. Each left singular vector is sign-normalized so
// that its largest-magnitude entry is nonnegative (v follows u).
SvdResult truncated_svd(const Matrix& a, std::size_t r);

// Leading r left singular vectors only, same sign convention.
Matrix leading_left_singular_vectors(const Matrix& a, std::size_t r);

struct EigResult {
  Vector values;   // ascending
  Matrix vectors;  // n x k, orthonormal columns
};

// k smallest eigenpairs of a symmetric matrix. The input is symmetrized as
// (A + A^T)/2 after checking |A - A^T| <= 1e-10 entrywise (SymmetryError).
EigResult sym_eig_smallest(const Matrix& a, std::size_t k);

}  // namespace tomd::linalg
