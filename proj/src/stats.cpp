#include "seqcs/stats.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "seqcs/errors.hpp"
#include "seqcs/random.hpp"

namespace seqcs::stats {

namespace {

constexpr int kMaxTerms = 100000;

// Lower-tail series: P(a,x) = x^a e^-x / Gamma(a) * sum_k x^k / (a(a+1)..(a+k)).
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < kMaxTerms; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * std::numeric_limits<double>::epsilon())
      return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
  }
  throw ConvergenceFailureError("gamma_p_series: series did not converge");
}

// Upper-tail continued fraction (modified Lentz): Q(a,x).
double gamma_q_cf(double a, double x) {
  const double eps = std::numeric_limits<double>::epsilon();
  const double fpmin = std::numeric_limits<double>::min() / eps;
  double b = x + 1.0 - a;
  double c = 1.0 / fpmin;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxTerms; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < fpmin) d = fpmin;
    c = b + an / c;
    if (std::abs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) <= eps) return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
  }
  throw ConvergenceFailureError("gamma_q_cf: continued fraction did not converge");
}

}  // namespace

double regularized_gamma_p(double a, double x) {
  if (!(a > 0.0) || x < 0.0 || !std::isfinite(x))
    throw Error("regularized_gamma_p: need a > 0, x >= 0");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_cf(a, x);
}

double chi2_cdf(double x, int dof) {
  if (dof < 1) throw DegreesOfFreedomError("chi2_cdf: need T >= 1");
  if (x < 0.0) throw Error("chi2_cdf: need x >= 0");
  return regularized_gamma_p(0.5 * dof, 0.5 * x);
}

double chi2_pdf(double x, int dof) {
  if (dof < 1) throw DegreesOfFreedomError("chi2_pdf: need T >= 1");
  if (x < 0.0) return 0.0;
  const double half = 0.5 * dof;
  if (x == 0.0) {
    if (dof == 1) return std::numeric_limits<double>::infinity();
    if (dof == 2) return 0.5;
    return 0.0;
  }
  return std::exp((half - 1.0) * std::log(x) - 0.5 * x - half * std::numbers::ln2 -
                  std::lgamma(half));
}

double chi2_quantile(double p, int dof) {
  if (!(p > 0.0 && p < 1.0)) throw Error("chi2_quantile: need 0 < p < 1");
  if (dof < 1) throw DegreesOfFreedomError("chi2_quantile: need T >= 1");

  double lo = 0.0;
  double hi = dof + 10.0 * std::sqrt(2.0 * dof) + 10.0;
  int guard = 0;
  while (chi2_cdf(hi, dof) < p) {
    hi *= 2.0;
    if (++guard > 400) throw ConvergenceFailureError("chi2_quantile: bracket failed");
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (chi2_cdf(mid, dof) < p)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-12 * (1.0 + hi)) break;
  }
  double x = 0.5 * (lo + hi);
  for (int i = 0; i < 20; ++i) {
    const double err = chi2_cdf(x, dof) - p;
    if (std::abs(err) <= 1e-10) break;
    const double dens = chi2_pdf(x, dof);
    if (!(dens > 0.0)) break;
    double step = err / dens;
    double next = x - step;
    if (next <= lo || next >= hi) next = 0.5 * (lo + hi);
    if (chi2_cdf(next, dof) < p)
      lo = next;
    else
      hi = next;
    x = next;
  }
  if (std::abs(chi2_cdf(x, dof) - p) > 1e-9)
    throw ConvergenceFailureError("chi2_quantile: tolerance not reached");
  return x;
}

namespace {

struct RunningMoments {
  std::int64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
};

}  // namespace

CtMomentReport sample_ct(int l, int t, std::int64_t n_samples, std::uint64_t seed) {
  if (!(l >= t && t >= 1)) throw Error("sample_ct: need L >= T >= 1");
  if (n_samples < 100) throw Error("sample_ct: need at least 100 samples");
  RngStream stream(seed);
  std::vector<double> vals(static_cast<std::size_t>(n_samples));
  for (auto& v : vals) {
    double full = 0.0;
    double head = 0.0;
    for (int i = 0; i < l; ++i) {
      const double h = stream.normal();
      full += h * h;
      if (i < t) head += h * h;
    }
    v = std::sqrt(full / head);
  }
  CtMomentReport rep;
  rep.l = l;
  rep.t = t;
  rep.count = n_samples;
  double mean = 0.0;
  for (double v : vals) mean += v;
  mean /= static_cast<double>(n_samples);
  double m2 = 0.0, m4 = 0.0;
  for (double v : vals) {
    const double d = v - mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  const double nn = static_cast<double>(n_samples);
  rep.sample_mean = mean;
  rep.sample_variance = m2 / (nn - 1.0);
  rep.sample_fourth_central = m4 / nn;
  rep.mean_estimate = std::sqrt(static_cast<double>(l) / t);
  if (t > 2) {
    rep.mean_bound = std::sqrt((l - 2.0) / (t - 2.0));
    rep.var_bound = (l - 2.0) / (t - 2.0) - static_cast<double>(l) / t;
  } else {
    rep.mean_bound = std::numeric_limits<double>::quiet_NaN();
    rep.var_bound = std::numeric_limits<double>::quiet_NaN();
  }
  rep.se_mean = std::sqrt(rep.sample_variance / nn);
  const double var_of_var =
      (rep.sample_fourth_central - rep.sample_variance * rep.sample_variance) / nn;
  rep.se_variance = var_of_var > 0.0 ? std::sqrt(var_of_var) : 0.0;
  return rep;
}

Sin2Identities verify_sin2_identities(int l, int t, std::int64_t n_samples, std::uint64_t seed) {
  if (!(l >= t && t >= 1)) throw Error("verify_sin2_identities: need L >= T >= 1");
  if (t <= 2)
    throw DegreesOfFreedomError("verify_sin2_identities: inverse identity needs T > 2");
  RngStream stream(seed);
  RunningMoments sin2, inv;
  for (std::int64_t s = 0; s < n_samples; ++s) {
    double full = 0.0;
    double head = 0.0;
    for (int i = 0; i < l; ++i) {
      const double h = stream.normal();
      full += h * h;
      if (i < t) head += h * h;
    }
    sin2.add(head / full);
    inv.add(full / head);
  }
  auto finish = [](const RunningMoments& rm, double target) {
    MomentReport r;
    r.count = rm.n;
    r.sample_mean = rm.mean;
    r.sample_variance = rm.variance();
    r.closed_form = target;
    r.abs_deviation = std::abs(rm.mean - target);
    r.rel_deviation = target != 0.0 ? r.abs_deviation / std::abs(target) : r.abs_deviation;
    r.standard_error = std::sqrt(r.sample_variance / static_cast<double>(rm.n));
    return r;
  };
  Sin2Identities out;
  out.sin2 = finish(sin2, static_cast<double>(t) / l);
  out.inv_sin2 = finish(inv, (l - 2.0) / (t - 2.0));
  return out;
}

}  // namespace seqcs::stats
