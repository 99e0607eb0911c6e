#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "seqcs/errors.hpp"
#include "seqcs/stats.hpp"

using namespace seqcs;

TEST_SUITE("stats") {
  TEST_CASE("chi-square cdf has the distribution limits") {
    for (int dof : {1, 2, 5, 20}) {
      CHECK(stats::chi2_cdf(0.0, dof) == 0.0);
      CHECK(stats::chi2_cdf(1e4, dof) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  TEST_CASE("two degrees of freedom reduce to the exponential closed form") {
    for (double x = 0.05; x < 30.0; x += 0.37) {
      CHECK(stats::chi2_cdf(x, 2) == doctest::Approx(1.0 - std::exp(-0.5 * x)).epsilon(1e-12));
    }
  }

  TEST_CASE("cdf agrees with the quadrature reference on a spot grid") {
    for (int dof : {1, 2, 3, 7, 15, 40}) {
      for (double x : {0.2, 1.0, 4.0, 12.0, 45.0}) {
        CHECK(std::abs(stats::chi2_cdf(x, dof) - testing::oracle_chi2_cdf(x, dof)) <= 1e-8);
      }
    }
  }

  TEST_CASE("cdf is monotone in x") {
    for (int dof : {1, 3, 10, 50}) {
      double prev = 0.0;
      for (double x = 0.0; x <= 120.0; x += 0.25) {
        const double v = stats::chi2_cdf(x, dof);
        CHECK(v >= prev - 1e-12);
        prev = v;
      }
    }
  }

  TEST_CASE("pdf matches the cdf slope") {
    for (int dof : {1, 4, 9}) {
      for (double x : {0.5, 2.0, 8.0}) {
        const double h = 1e-6;
        const double slope = (stats::chi2_cdf(x + h, dof) - stats::chi2_cdf(x - h, dof)) / (2 * h);
        CHECK(stats::chi2_pdf(x, dof) == doctest::Approx(slope).epsilon(1e-5));
      }
    }
  }

  TEST_CASE("median of two degrees of freedom is 2 ln 2") {
    CHECK(std::abs(stats::chi2_quantile(0.5, 2) - 2.0 * std::log(2.0)) <= 1e-9);
  }

  TEST_CASE("quantile round-trips through the cdf") {
    for (int dof : {1, 2, 5, 10, 25, 50, 100}) {
      for (double p : {0.001, 0.01, 0.1, 0.5, 0.9, 0.99, 0.999}) {
        const double x = stats::chi2_quantile(p, dof);
        CHECK(std::abs(stats::chi2_cdf(x, dof) - p) <= 1e-9);
      }
    }
  }

  TEST_CASE("quantile agrees with a bisection-only inversion") {
    for (int dof : {2, 7, 30}) {
      for (double p : {0.05, 0.5, 0.95}) {
        const double ref = testing::oracle_quantile_bisect(p, dof, &stats::chi2_cdf);
        CHECK(std::abs(stats::chi2_quantile(p, dof) - ref) <= 1e-8);
      }
    }
  }

  TEST_CASE("regularized gamma basics") {
    CHECK(stats::regularized_gamma_p(0.5, 0.0) == 0.0);
    CHECK(stats::regularized_gamma_p(0.5, 100.0) == doctest::Approx(1.0).epsilon(1e-12));
    // P(1, x) = 1 - exp(-x).
    CHECK(stats::regularized_gamma_p(1.0, 2.0) ==
          doctest::Approx(1.0 - std::exp(-2.0)).epsilon(1e-12));
  }

  TEST_CASE("holdout ratio degenerates to one when nothing is held back") {
    const auto r = stats::sample_ct(20, 20, 500, 1);
    CHECK(r.sample_mean == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.sample_variance == doctest::Approx(0.0).epsilon(1e-12));
  }

  TEST_CASE("holdout ratio samples satisfy the closed-form mean and bounds") {
    const auto r = stats::sample_ct(100, 10, 5000, 2);
    CHECK(r.count == 5000);
    CHECK(r.mean_estimate == doctest::Approx(std::sqrt(10.0)).epsilon(1e-12));
    CHECK(r.mean_bound == doctest::Approx(3.5).epsilon(1e-12));
    CHECK(r.var_bound == doctest::Approx(2.25).epsilon(1e-12));
    // The ratio is 1/sin(theta) with sin^2(theta) ~ Beta(T/2, (L-T)/2), so the
    // exact mean is B(T/2 - 1/2, (L-T)/2) / B(T/2, (L-T)/2).
    const double l = 100.0, t = 10.0;
    const double exact_mean = std::exp(std::lgamma(t / 2.0 - 0.5) - std::lgamma(t / 2.0) +
                                       std::lgamma(l / 2.0) - std::lgamma(l / 2.0 - 0.5));
    CHECK(exact_mean == doctest::Approx(3.40127).epsilon(1e-5));
    CHECK(std::abs(r.sample_mean - exact_mean) <= 4.0 * r.se_mean);
    CHECK(r.sample_mean <= r.mean_bound + 3.0 * r.se_mean);
    CHECK(r.sample_variance <= r.var_bound + 3.0 * r.se_variance);
    CHECK(r.sample_mean >= 1.0);  // the ratio is >= 1 by construction
  }

  TEST_CASE("holdout ratio bounds are undefined at two degrees of freedom") {
    const auto r = stats::sample_ct(50, 2, 200, 3);
    CHECK(std::isnan(r.mean_bound));
    CHECK(std::isnan(r.var_bound));
    CHECK(r.sample_mean >= 1.0);
  }

  TEST_CASE("subspace angle identities hold in Monte Carlo") {
    const auto ids = stats::verify_sin2_identities(100, 10, 30000, 4);
    CHECK(ids.sin2.closed_form == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(ids.inv_sin2.closed_form == doctest::Approx(12.25).epsilon(1e-12));
    CHECK(std::abs(ids.sin2.sample_mean - 0.1) <= 0.002);
    CHECK(std::abs(ids.inv_sin2.sample_mean - 12.25) <= 0.05 * 12.25);
    CHECK(ids.sin2.standard_error > 0.0);
  }

  TEST_CASE("subspace angle identities are exact at full dimension") {
    const auto ids = stats::verify_sin2_identities(15, 15, 300, 5);
    CHECK(ids.sin2.sample_mean == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ids.inv_sin2.sample_mean == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ids.sin2.sample_variance == doctest::Approx(0.0).epsilon(1e-12));
  }

  TEST_CASE("second identity requires more than two held-out rows") {
    CHECK_THROWS_AS(stats::verify_sin2_identities(50, 2, 100, 6), DegreesOfFreedomError);
  }

  TEST_CASE("monte carlo reruns with one seed are identical") {
    const auto a = stats::sample_ct(60, 6, 400, 77);
    const auto b = stats::sample_ct(60, 6, 400, 77);
    CHECK(a.sample_mean == b.sample_mean);
    CHECK(a.sample_variance == b.sample_variance);
  }
}
