#pragma once

#include "seqcs/types.hpp"

namespace seqcs::linalg {

/// Throws NonFiniteError if any entry is NaN or infinite.
void require_finite(const Matrix& a, const char* what);
void require_finite(const Vector& v, const char* what);

/// Minimum-norm solution of A x = b for a full-row-rank A (M <= N), via a
/// column-pivoted QR factorization of A'. Throws RankDeficientError when the
/// factorization detects rank below M.
Vector min_norm_solution(const Matrix& a, const Vector& b);

/// Euclidean distance from a point to the affine solution space {x : A x = y}.
/// Equals the norm of the row-space projection of (xhat - x0) for any feasible
/// x0; computed as the min-norm solution of A v = A xhat - y.
double affine_distance(const Matrix& a, const Vector& y, const Vector& xhat);

/// Largest absolute inner product between distinct unit-normalized columns.
/// Throws ZeroColumnError on a (near-)zero column.
double mutual_coherence(const Matrix& a);

}  // namespace seqcs::linalg
