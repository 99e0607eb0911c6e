#include "seqcs/solvers.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "seqcs/errors.hpp"
#include "seqcs/linalg.hpp"

namespace seqcs {

Vector omp(const Matrix& a, const Vector& y, double residual_tol) {
  const int m = static_cast<int>(a.rows());
  const int n = static_cast<int>(a.cols());
  if (m == 0 || n == 0) throw ConfigError("omp: empty measurement matrix");
  if (y.size() != m) throw ConfigError("omp: row/value count mismatch");
  linalg::require_finite(a, "measurement matrix");
  linalg::require_finite(y, "measurement values");

  const double target = residual_tol * (1.0 + y.norm());
  Vector residual = y;
  Vector x = Vector::Zero(n);
  std::vector<int> support;
  std::vector<char> in_support(n, 0);

  while (residual.norm() > target && static_cast<int>(support.size()) < m) {
    // Select the column most correlated with the current residual.
    const Vector corr = a.transpose() * residual;
    int best = -1;
    double best_mag = 0.0;
    for (int j = 0; j < n; ++j) {
      if (in_support[j]) continue;
      const double mag = std::abs(corr[j]);
      if (mag > best_mag) {
        best_mag = mag;
        best = j;
      }
    }
    if (best < 0) {
      throw NoProgressError("omp: no correlated column left while the residual is above target");
    }
    support.push_back(best);
    in_support[best] = 1;

    // Re-fit on the enlarged support by least squares.
    Matrix a_s(m, support.size());
    for (std::size_t k = 0; k < support.size(); ++k) a_s.col(k) = a.col(support[k]);
    const Vector coef = a_s.colPivHouseholderQr().solve(y);
    const Vector next_residual = y - a_s * coef;

    if (next_residual.norm() > residual.norm() * (1.0 - 1e-12) &&
        next_residual.norm() > target) {
      throw NoProgressError("omp: residual stagnated before reaching the target");
    }
    residual = next_residual;
    x.setZero();
    for (std::size_t k = 0; k < support.size(); ++k) x[support[k]] = coef[k];
  }
  return x;
}

namespace {

double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

// Largest violation of the stationarity conditions of the l1-penalized least
// squares objective at x, given the smooth gradient g = A'(Ax - y).
double subgradient_residual(const Vector& x, const Vector& g, double lambda) {
  double worst = 0.0;
  for (int i = 0; i < x.size(); ++i) {
    double v;
    if (x[i] > 0.0) {
      v = std::abs(g[i] + lambda);
    } else if (x[i] < 0.0) {
      v = std::abs(g[i] - lambda);
    } else {
      v = std::max(0.0, std::abs(g[i]) - lambda);
    }
    worst = std::max(worst, v);
  }
  return worst;
}

// Spectral-norm-squared estimate of A via a few power iterations on A'A;
// gives the initial proximal-gradient step length.
double lipschitz_estimate(const Matrix& a) {
  Vector v = Vector::Ones(a.cols());
  v.normalize();
  double lam = 1.0;
  for (int it = 0; it < 20; ++it) {
    Vector w = a.transpose() * (a * v);
    const double norm = w.norm();
    if (norm <= 0.0) return 1.0;
    lam = norm;
    v = w / norm;
  }
  return std::max(lam, 1e-12);
}

}  // namespace

BpdnReport bpdn(const Matrix& a, const Vector& y, double lambda, const BpdnOptions& options) {
  const int m = static_cast<int>(a.rows());
  const int n = static_cast<int>(a.cols());
  if (m == 0 || n == 0) throw ConfigError("bpdn: empty measurement matrix");
  if (y.size() != m) throw ConfigError("bpdn: row/value count mismatch");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("bpdn: lambda must be >= 0");
  linalg::require_finite(a, "measurement matrix");
  linalg::require_finite(y, "measurement values");

  Vector x;
  if (options.x0.has_value()) {
    if (options.x0->size() != n) throw ConfigError("bpdn: warm-start size mismatch");
    x = *options.x0;
    linalg::require_finite(x, "warm-start point");
  } else {
    x = Vector::Zero(n);
  }

  const double step0 = 1.0 / lipschitz_estimate(a);
  double step = step0;
  Vector ax = a * x;
  double smooth = 0.5 * (ax - y).squaredNorm();
  Vector grad = a.transpose() * (ax - y);
  const double tol = options.convergence_tol * std::max(1.0, lambda);

  BpdnReport report;
  for (int it = 0; it < options.max_iterations; ++it) {
    if (subgradient_residual(x, grad, lambda) <= tol) {
      report.solution = x;
      report.objective = smooth + lambda * x.lpNorm<1>();
      report.iterations = it;
      return report;
    }

    // Proximal step with backtracking on the quadratic upper model.
    Vector x_next(n);
    Vector ax_next(m);
    double smooth_next = 0.0;
    for (;;) {
      for (int i = 0; i < n; ++i) {
        x_next[i] = soft_threshold(x[i] - step * grad[i], step * lambda);
      }
      ax_next = a * x_next;
      smooth_next = 0.5 * (ax_next - y).squaredNorm();
      const Vector diff = x_next - x;
      const double model = smooth + grad.dot(diff) + diff.squaredNorm() / (2.0 * step);
      if (smooth_next <= model + 1e-15 * std::max(1.0, std::abs(model))) break;
      step *= 0.5;
      if (step < 1e-18 * step0) {
        throw ConvergenceFailureError("bpdn: backtracking step length underflowed");
      }
    }
    x.swap(x_next);
    ax.swap(ax_next);
    smooth = smooth_next;
    grad.noalias() = a.transpose() * (ax - y);
    step = std::min(step * 1.25, step0);  // recover step length after backtracks
  }
  throw IterationLimitError("bpdn: iteration cap reached before the optimality residual converged");
}

double lambda_schedule(int num_measurements, int signal_dim, double c) {
  if (num_measurements < 1) throw ConfigError("lambda_schedule: need at least one measurement");
  if (signal_dim < 2) throw ConfigError("lambda_schedule: signal dimension must be at least 2");
  if (!(c > 0.0)) throw ConfigError("lambda_schedule: scale must be positive");
  return c * std::sqrt(static_cast<double>(num_measurements) *
                       std::log(static_cast<double>(signal_dim)));
}

}  // namespace seqcs
