#pragma once

#include <optional>

#include "seqcs/simplex.hpp"
#include "seqcs/types.hpp"

namespace seqcs {

/// Orthogonal matching pursuit: greedily grows a support set, re-fitting by
/// least squares, until the residual falls below residual_tol * (1 + ||y||_2)
/// or the support reaches the number of rows. Throws NoProgressError if the
/// residual stops shrinking before either condition is met.
Vector omp(const Matrix& a, const Vector& y, double residual_tol = 1e-8);

struct BpdnOptions {
  double convergence_tol = 1e-8;  // on the scaled subgradient residual
  int max_iterations = 200000;
  std::optional<Vector> x0;  // warm-start point; zeros when absent
};

struct BpdnReport {
  Vector solution;
  double objective = 0.0;  // 0.5 * ||Ax - y||_2^2 + lambda * ||x||_1
  int iterations = 0;
};

/// Basis pursuit denoising: min 0.5 ||Ax - y||_2^2 + lambda ||x||_1 by
/// proximal gradient descent with backtracking line search. Convergence is
/// certified by the subgradient optimality residual; exceeding the iteration
/// cap throws IterationLimitError.
BpdnReport bpdn(const Matrix& a, const Vector& y, double lambda, const BpdnOptions& options = {});

/// Regularization schedule lambda(M) = c * sqrt(M * ln N) tying the penalty
/// weight to the measurement count and ambient dimension.
double lambda_schedule(int num_measurements, int signal_dim, double c);

}  // namespace seqcs
