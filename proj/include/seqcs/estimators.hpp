#pragma once

#include <string>
#include <vector>

#include "seqcs/ensembles.hpp"
#include "seqcs/types.hpp"

namespace seqcs {

/// Expected ratio between the true error and the holdout distance when the
/// undetermined subspace has dimension l and t holdout rows are used:
/// sqrt(l / t).
double ct_mean_estimate(int l, int t);

/// Upper bound on that expected ratio, sqrt((l - 2) / (t - 2)); requires
/// t > 2 (DegreesOfFreedomError otherwise).
double ct_mean_bound(int l, int t);

/// Variance bound (l - 2) / (t - 2) - l / t for the same ratio; requires
/// t > 2 (DegreesOfFreedomError otherwise).
double ct_var_bound(int l, int t);

enum class CertMethod { ChebyshevCT, Chi2, JlStyle, SinTheta };

const char* to_string(CertMethod m);

/// An error statement about a fixed reconstruction, produced from holdout
/// measurements the reconstruction was not fitted to.
struct ErrorCertificate {
  double point_estimate = 0.0;   // plausible value of ||x - xhat||_2
  double upper_bound = 0.0;      // certified with the stated confidence
  double confidence = 0.0;       // probability the bound holds
  CertMethod method = CertMethod::ChebyshevCT;
  int holdout = 0;               // number of held-out measurements used
  double noise_sigma = 0.0;
  double parameter = 0.0;        // Chebyshev k or chi-square alpha
  bool below_noise_floor = false;  // squared estimate was clamped at zero
};

/// Holdout deviations z_i = a_i' xhat - y_i for rows not used in the fit.
struct HoldoutBatch {
  Vector deviations;

  int count() const { return static_cast<int>(deviations.size()); }
  double sum_of_squares() const { return deviations.squaredNorm(); }

  static HoldoutBatch from_deviations(Vector z);
  static HoldoutBatch from_records(const Vector& xhat, const std::vector<MeasurementRecord>& recs);
};

/// Distribution-free bound: with probability at least 1 - 1/k^2 over the
/// holdout rows, ||x - xhat||_2 <= (mean_bound + k * sqrt(var_bound)) * d
/// where d is the holdout distance. Requires t > 2 and k > 0.
ErrorCertificate chebyshev_bound(double holdout_distance, int l, int t, double k);

/// Convenience wrapper: splits the stacked system into the first rows (the
/// fit) and the last t rows (the holdout), checks that xhat satisfies the fit
/// rows exactly (InfeasibleReconstructionError otherwise), and applies
/// chebyshev_bound with l = signal_dim - fit_rows.
ErrorCertificate certify_chebyshev(const Matrix& a_all, const Vector& y_all, const Vector& xhat,
                                   int t, double k);

/// Tail bound from the squared holdout deviations: with probability 1 - alpha,
/// ||x - xhat||_2^2 < (Z / z* - sigma_n^2) / row_variance where Z is the sum
/// of squared deviations and z* is the largest value with
/// P(ChiSquare(t) <= z*) <= alpha. Negative radicands clamp to zero and set
/// below_noise_floor. Exact for Gaussian rows; approximate otherwise.
ErrorCertificate chi2_interval(const HoldoutBatch& batch, double alpha, double noise_sigma = 0.0,
                               double row_variance = 1.0);

/// Unbiased-in-square point estimate sqrt(Z / t) from the holdout deviations.
double jl_style_estimate(const HoldoutBatch& batch);

/// Point estimate sqrt(l / t) * d(xhat, H) where d is the distance from xhat
/// to the affine solution set of the full stacked system and l is the
/// null-space dimension of the fit rows (l = signal_dim - fit_rows, passed
/// explicitly and validated). The first rows(a_all) - t rows must be
/// satisfied exactly by xhat.
double sin_theta_point_estimate(const Matrix& a_all, const Vector& y_all, const Vector& xhat,
                                int l, int t);

}  // namespace seqcs
