#include "seqcs/estimators.hpp"

#include <cmath>

#include "seqcs/errors.hpp"
#include "seqcs/linalg.hpp"
#include "seqcs/stats.hpp"

namespace seqcs {

namespace {

void check_lt(int l, int t) {
  if (t < 1) throw ConfigError("holdout count must be at least 1");
  if (l < t) throw ConfigError("undetermined dimension must be at least the holdout count");
}

// Feasibility gate for certificates: the reconstruction must satisfy the fit
// rows it was computed from, otherwise the holdout geometry says nothing.
void require_fit_feasible(const Matrix& a_fit, const Vector& y_fit, const Vector& xhat) {
  const double resid = (a_fit * xhat - y_fit).lpNorm<Eigen::Infinity>();
  const double allowed = 1e-7 * (1.0 + y_fit.lpNorm<Eigen::Infinity>());
  if (!(resid <= allowed)) {
    throw InfeasibleReconstructionError(
        "reconstruction does not satisfy the rows it was fit to (residual " +
        std::to_string(resid) + ")");
  }
}

}  // namespace

const char* to_string(CertMethod m) {
  switch (m) {
    case CertMethod::ChebyshevCT:
      return "chebyshev_ct";
    case CertMethod::Chi2:
      return "chi_square";
    case CertMethod::JlStyle:
      return "jl_style";
    case CertMethod::SinTheta:
      return "sin_theta";
  }
  return "unknown";
}

double ct_mean_estimate(int l, int t) {
  check_lt(l, t);
  return std::sqrt(static_cast<double>(l) / static_cast<double>(t));
}

double ct_mean_bound(int l, int t) {
  check_lt(l, t);
  if (t <= 2) throw DegreesOfFreedomError("mean bound needs more than 2 holdout rows");
  return std::sqrt(static_cast<double>(l - 2) / static_cast<double>(t - 2));
}

double ct_var_bound(int l, int t) {
  check_lt(l, t);
  if (t <= 2) throw DegreesOfFreedomError("variance bound needs more than 2 holdout rows");
  const double second = static_cast<double>(l - 2) / static_cast<double>(t - 2);
  const double mean_sq = static_cast<double>(l) / static_cast<double>(t);
  return std::max(0.0, second - mean_sq);
}

HoldoutBatch HoldoutBatch::from_deviations(Vector z) {
  if (z.size() == 0) throw ConfigError("holdout batch needs at least one deviation");
  linalg::require_finite(z, "holdout deviations");
  return HoldoutBatch{std::move(z)};
}

HoldoutBatch HoldoutBatch::from_records(const Vector& xhat,
                                        const std::vector<MeasurementRecord>& recs) {
  if (recs.empty()) throw ConfigError("holdout batch needs at least one record");
  Vector z(recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    if (recs[i].row.size() != xhat.size()) {
      throw ConfigError("holdout record dimension does not match the reconstruction");
    }
    z[static_cast<int>(i)] = recs[i].row.dot(xhat) - recs[i].value;
  }
  return from_deviations(std::move(z));
}

ErrorCertificate chebyshev_bound(double holdout_distance, int l, int t, double k) {
  if (!(holdout_distance >= 0.0)) throw ConfigError("holdout distance must be nonnegative");
  if (!(k > 0.0)) throw ConfigError("chebyshev deviation multiple k must be positive");
  ErrorCertificate cert;
  cert.method = CertMethod::ChebyshevCT;
  cert.holdout = t;
  cert.parameter = k;
  cert.point_estimate = ct_mean_estimate(l, t) * holdout_distance;
  cert.upper_bound =
      (ct_mean_bound(l, t) + k * std::sqrt(ct_var_bound(l, t))) * holdout_distance;
  cert.confidence = 1.0 - 1.0 / (k * k);
  return cert;
}

ErrorCertificate certify_chebyshev(const Matrix& a_all, const Vector& y_all, const Vector& xhat,
                                   int t, double k) {
  const int rows = static_cast<int>(a_all.rows());
  const int n = static_cast<int>(a_all.cols());
  if (y_all.size() != rows) throw ConfigError("certify: row/value count mismatch");
  if (xhat.size() != n) throw ConfigError("certify: reconstruction dimension mismatch");
  if (t < 1 || t > rows) throw ConfigError("certify: holdout count must be in [1, rows]");
  const int fit_rows = rows - t;
  const int l = n - fit_rows;
  if (l < t) throw ConfigError("certify: holdout exceeds the undetermined dimension");
  if (fit_rows > 0) require_fit_feasible(a_all.topRows(fit_rows), y_all.head(fit_rows), xhat);
  const double d = linalg::affine_distance(a_all, y_all, xhat);
  return chebyshev_bound(d, l, t, k);
}

ErrorCertificate chi2_interval(const HoldoutBatch& batch, double alpha, double noise_sigma,
                               double row_variance) {
  const int t = batch.count();
  if (t < 1) throw ConfigError("chi-square interval needs at least one holdout row");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie strictly in (0, 1)");
  if (!(noise_sigma >= 0.0)) throw ConfigError("noise level must be nonnegative");
  if (!(row_variance > 0.0)) throw ConfigError("row variance must be positive");

  const double z_sum = batch.sum_of_squares();
  const double z_star = stats::chi2_quantile(alpha, t);
  const double sigma2 = noise_sigma * noise_sigma;

  ErrorCertificate cert;
  cert.method = CertMethod::Chi2;
  cert.holdout = t;
  cert.parameter = alpha;
  cert.noise_sigma = noise_sigma;
  cert.confidence = 1.0 - alpha;

  const double point_sq = (z_sum / static_cast<double>(t) - sigma2) / row_variance;
  const double bound_sq = (z_sum / z_star - sigma2) / row_variance;
  if (point_sq < 0.0 || bound_sq < 0.0) cert.below_noise_floor = true;
  cert.point_estimate = std::sqrt(std::max(0.0, point_sq));
  cert.upper_bound = std::sqrt(std::max(0.0, bound_sq));
  return cert;
}

double jl_style_estimate(const HoldoutBatch& batch) {
  const int t = batch.count();
  if (t < 1) throw ConfigError("estimate needs at least one holdout row");
  return std::sqrt(batch.sum_of_squares() / static_cast<double>(t));
}

double sin_theta_point_estimate(const Matrix& a_all, const Vector& y_all, const Vector& xhat,
                                int l, int t) {
  const int rows = static_cast<int>(a_all.rows());
  const int n = static_cast<int>(a_all.cols());
  if (y_all.size() != rows) throw ConfigError("estimate: row/value count mismatch");
  if (xhat.size() != n) throw ConfigError("estimate: reconstruction dimension mismatch");
  if (t < 1 || t > rows) throw ConfigError("estimate: holdout count must be in [1, rows]");
  const int fit_rows = rows - t;
  if (l != n - fit_rows) {
    throw ConfigError("estimate: l must equal signal_dim minus the number of fit rows");
  }
  if (l < 1) throw ConfigError("estimate: fit rows already determine the signal");
  if (fit_rows > 0) require_fit_feasible(a_all.topRows(fit_rows), y_all.head(fit_rows), xhat);
  const double d = linalg::affine_distance(a_all, y_all, xhat);
  return std::sqrt(static_cast<double>(l) / static_cast<double>(t)) * d;
}

}  // namespace seqcs
