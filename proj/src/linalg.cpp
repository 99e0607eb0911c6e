#include "seqcs/linalg.hpp"

#include <cmath>
#include <string>

#include "seqcs/errors.hpp"

namespace seqcs::linalg {

namespace {
constexpr double kRankRelTol = 1e-10;
constexpr double kZeroColumnTol = 1e-12;
}  // namespace

void require_finite(const Matrix& a, const char* what) {
  if (!a.allFinite()) throw NonFiniteError(std::string(what) + ": non-finite entries");
}

void require_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) throw NonFiniteError(std::string(what) + ": non-finite entries");
}

Vector min_norm_solution(const Matrix& a, const Vector& b) {
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  if (m > n) throw Error("min_norm_solution: expected M <= N");
  if (b.size() != m) throw Error("min_norm_solution: rhs length mismatch");
  require_finite(a, "min_norm_solution A");
  require_finite(b, "min_norm_solution b");
  if (m == 0) return Vector::Zero(n);

  // A' P = Q R with |diag R| non-increasing; then x = A'(AA')^{-1} b = Q R^{-T} P' b.
  Eigen::ColPivHouseholderQR<Matrix> qr(a.transpose());
  const Matrix& qrm = qr.matrixQR();
  const double dmax = std::abs(qrm(0, 0));
  for (Eigen::Index i = 0; i < m; ++i) {
    if (std::abs(qrm(i, i)) < kRankRelTol * dmax || dmax == 0.0)
      throw RankDeficientError("min_norm_solution: rank-deficient row set");
  }

  const Vector pb = qr.colsPermutation().transpose() * b;
  const Vector z = qrm.topLeftCorner(m, m)
                       .triangularView<Eigen::Upper>()
                       .transpose()
                       .solve(pb);
  Vector padded = Vector::Zero(n);
  padded.head(m) = z;
  Vector x = qr.householderQ() * padded;

  const double resid = (a * x - b).norm();
  if (!(resid <= 1e-9 * (1.0 + b.norm())))
    throw RankDeficientError("min_norm_solution: residual check failed");
  return x;
}

double affine_distance(const Matrix& a, const Vector& y, const Vector& xhat) {
  if (xhat.size() != a.cols()) throw Error("affine_distance: point length mismatch");
  require_finite(xhat, "affine_distance xhat");
  const Vector r = a * xhat - y;
  return min_norm_solution(a, r).norm();
}

double mutual_coherence(const Matrix& a) {
  const Eigen::Index n = a.cols();
  require_finite(a, "mutual_coherence A");
  Matrix unit = a;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double nrm = unit.col(j).norm();
    if (nrm < kZeroColumnTol) throw ZeroColumnError("mutual_coherence: zero column");
    unit.col(j) /= nrm;
  }
  double best = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      best = std::max(best, std::abs(unit.col(i).dot(unit.col(j))));
  return std::min(best, 1.0);
}

}  // namespace seqcs::linalg
