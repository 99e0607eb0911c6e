#pragma once

#include <cstdint>

#include "seqcs/types.hpp"

namespace seqcs::stats {

/// Regularized lower incomplete gamma P(a, x). Series expansion for
/// x < a + 1, continued fraction otherwise.
double regularized_gamma_p(double a, double x);

/// Chi-square CDF with T degrees of freedom: P(T/2, x/2).
double chi2_cdf(double x, int dof);

/// Chi-square density.
double chi2_pdf(double x, int dof);

/// Inverse of chi2_cdf at probability p, |cdf(x) - p| <= 1e-9. Bisection
/// bracket followed by Newton refinement; throws ConvergenceFailureError
/// if the tolerance is not reached.
double chi2_quantile(double p, int dof);

/// Monte Carlo summary of one scalar statistic against a closed-form target.
struct MomentReport {
  std::int64_t count = 0;
  double sample_mean = 0.0;
  double sample_variance = 0.0;  // unbiased
  double closed_form = 0.0;
  double abs_deviation = 0.0;    // |sample_mean - closed_form|
  double rel_deviation = 0.0;
  double standard_error = 0.0;   // of the sample mean
};

/// Monte Carlo summary of the holdout amplification factor
/// C_T = ||h||_2 / ||h_{1:T}||_2 for h i.i.d. standard normal in R^L.
struct CtMomentReport {
  int l = 0;
  int t = 0;
  std::int64_t count = 0;
  double sample_mean = 0.0;
  double sample_variance = 0.0;
  double sample_fourth_central = 0.0;  // for the SE of the variance
  double mean_estimate = 0.0;          // sqrt(L/T)
  double mean_bound = 0.0;             // sqrt((L-2)/(T-2)), NaN for T <= 2
  double var_bound = 0.0;              // (L-2)/(T-2) - L/T, NaN for T <= 2
  double se_mean = 0.0;
  double se_variance = 0.0;
};

CtMomentReport sample_ct(int l, int t, std::int64_t n_samples, std::uint64_t seed);

/// Monte Carlo checks of the closed forms E[sin^2 theta] = T/L and
/// E[1/sin^2 theta] = (L-2)/(T-2). Throws DegreesOfFreedomError for T <= 2.
struct Sin2Identities {
  MomentReport sin2;      // target T/L
  MomentReport inv_sin2;  // target (L-2)/(T-2)
};

Sin2Identities verify_sin2_identities(int l, int t, std::int64_t n_samples, std::uint64_t seed);

}  // namespace seqcs::stats
