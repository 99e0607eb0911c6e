#include <doctest.h>

#include <cmath>

#include "seqcs/ensembles.hpp"
#include "seqcs/errors.hpp"
#include "seqcs/random.hpp"
#include "seqcs/sequential.hpp"

using namespace seqcs;

TEST_SUITE("sequential") {
  TEST_CASE("agreement holds at the truth for every noiseless measurement") {
    const Vector x = generate_signal(SignalSpec::exact_sparse(40, 6), 1);
    RngStream rng(2);
    for (int i = 0; i < 100; ++i) {
      const MeasurementRecord rec = measure(x, draw_row(EnsembleKind::GaussianStdNormal, 40, rng),
                                            0.0, rng);
      CHECK(check_agreement(x, rec));
    }
  }

  TEST_CASE("agreement at a wrong point has measure zero under gaussian rows") {
    const Vector xstar = generate_signal(SignalSpec::exact_sparse(40, 6), 3);
    Vector xhat = xstar;
    xhat[0] += 0.8;
    xhat[17] -= 1.1;
    RngStream rng(4);
    int agreements = 0;
    for (int i = 0; i < 10000; ++i) {
      const MeasurementRecord rec =
          measure(xstar, draw_row(EnsembleKind::GaussianStdNormal, 40, rng), 0.0, rng);
      if (check_agreement(xhat, rec)) ++agreements;
    }
    CHECK(agreements == 0);
  }

  TEST_CASE("sign-random rows agree with a two-entry mistake half the time") {
    const int n = 16;
    Vector xstar = Vector::Zero(n);
    Vector xhat = Vector::Zero(n);
    xhat[3] = 0.9;
    xhat[11] = -0.9;  // equal magnitudes, opposite signs

    // Exact enumeration of the four sign patterns on the two active entries:
    // equal signs cancel the error, opposite signs expose it.
    for (double s3 : {-1.0, 1.0}) {
      for (double s11 : {-1.0, 1.0}) {
        Vector row = Vector::Ones(n);
        row[3] = s3;
        row[11] = s11;
        MeasurementRecord rec{row, row.dot(xstar), 0.0};
        CHECK(check_agreement(xhat, rec) == (s3 == s11));
      }
    }

    RngStream rng(5);
    int agreements = 0;
    const int trials = 10000;
    for (int i = 0; i < trials; ++i) {
      const MeasurementRecord rec =
          measure(xstar, draw_row(EnsembleKind::BernoulliPM1, n, rng), 0.0, rng);
      if (check_agreement(xhat, rec)) ++agreements;
    }
    const double freq = agreements / static_cast<double>(trials);
    const double se = std::sqrt(0.25 / trials);
    CHECK(std::abs(freq - 0.5) <= 3.0 * se);
  }

  TEST_CASE("support counting respects the scale-aware threshold") {
    Vector x(4);
    x << 100.0, 1e-5, 0.0, -3.0;
    CHECK(default_zero_tol(x) == doctest::Approx(1e-6).epsilon(1e-12));
    CHECK(support_size(x, default_zero_tol(x)) == 3);
    CHECK(support_size(x, 1e-9) == 3);
    Vector tiny(3);
    tiny << 1e-10, -1e-12, 0.0;
    CHECK(support_size(tiny, default_zero_tol(tiny)) == 0);
  }

  TEST_CASE("cardinality rule needs strictly fewer nonzeros than rows") {
    CHECK(cardinality_stop(Vector::Zero(10), 1, 1e-8));
    Vector x(10);
    x.setZero();
    x[0] = 1.0;
    x[1] = -2.0;
    CHECK_FALSE(cardinality_stop(x, 2, 1e-8));
    CHECK(cardinality_stop(x, 3, 1e-8));
  }

  TEST_CASE("confirmation-length bound halves per step") {
    CHECK(t_step_rule_error_bound(1) == 0.5);
    CHECK(t_step_rule_error_bound(10) == doctest::Approx(0.0009765625).epsilon(1e-15));
  }

  TEST_CASE("sign-ensemble cardinality confidence formula") {
    CHECK(bernoulli_cardinality_confidence(100, 30) ==
          doctest::Approx(1.0 - 1e4 * std::exp2(-29.0)).epsilon(1e-12));
    CHECK(bernoulli_cardinality_confidence(100, 30) == doctest::Approx(0.999981).epsilon(1e-4));
    CHECK(bernoulli_cardinality_confidence(100, 10) == 0.0);
    CHECK(bernoulli_cardinality_confidence(1, 2) == doctest::Approx(0.5).epsilon(1e-12));
  }

  TEST_CASE("rule and reason names render") {
    CHECK(std::string(to_string(DecoderKind::BasisPursuitWarm)) == "bp_warm");
    CHECK(std::string(to_string(StopRuleKind::Cardinality)) == "cardinality");
    CHECK(std::string(to_string(StopReason::OneStepAgreement)) == "one_step_agreement");
    CHECK(std::string(to_string(StopReason::BudgetExhausted)) == "budget_exhausted");
  }

  TEST_CASE("an empty signal stops at the first measurement by cardinality") {
    SessionConfig cfg;
    cfg.signal = SignalSpec::exact_sparse(30, 0);
    cfg.rule = StoppingRule::cardinality();
    cfg.master_seed = 6;
    const SessionResult r = run_session(cfg);
    CHECK(r.stopped);
    CHECK(r.reason == StopReason::Cardinality);
    CHECK(r.m_stop == 1);
    CHECK(r.estimate.norm() <= 1e-10);
  }

  TEST_CASE("a starved budget reports exhaustion") {
    SessionConfig cfg;
    cfg.signal = SignalSpec::exact_sparse(30, 8);
    cfg.rule = StoppingRule::one_step();
    cfg.budget = 10;
    cfg.master_seed = 7;
    const SessionResult r = run_session(cfg);
    CHECK_FALSE(r.stopped);
    CHECK(r.reason == StopReason::BudgetExhausted);
    CHECK(r.m_stop == 10);
    CHECK(r.trace.size() == 10);
  }

  TEST_CASE("one-step agreement stops exactly and counts one confirmation") {
    SessionConfig cfg;
    cfg.signal = SignalSpec::exact_sparse(40, 5);
    cfg.rule = StoppingRule::one_step();
    cfg.master_seed = 8;
    const SessionResult r = run_session(cfg);
    REQUIRE(r.stopped);
    CHECK(r.reason == StopReason::OneStepAgreement);
    CHECK(r.confirmation_overhead == 1);
    CHECK((r.estimate - r.signal).norm() <= 1e-6);
    CHECK(r.trace.size() == static_cast<std::size_t>(r.m_stop));
    CHECK(r.trace.back().stopped);
    CHECK(r.trace.back().agreed);
  }

  TEST_CASE("multi-step agreement pays the full confirmation overhead") {
    SessionConfig cfg;
    cfg.signal = SignalSpec::exact_sparse(40, 5);
    cfg.ensemble = EnsembleKind::BernoulliPM1;
    cfg.rule = StoppingRule::t_step(3);
    cfg.master_seed = 9;
    const SessionResult r = run_session(cfg);
    REQUIRE(r.stopped);
    CHECK(r.reason == StopReason::TStepAgreement);
    CHECK(r.confirmation_overhead == 3);
    CHECK((r.estimate - r.signal).norm() <= 1e-6);
  }

  TEST_CASE("the l1 trace is monotone and the support stays within the row count") {
    SessionConfig cfg;
    cfg.signal = SignalSpec::exact_sparse(40, 5);
    cfg.rule = StoppingRule::one_step();
    cfg.master_seed = 10;
    const SessionResult r = run_session(cfg);
    REQUIRE(r.stopped);
    double prev = 0.0;
    for (const TraceRow& row : r.trace) {
      CHECK(row.l1 >= prev - 1e-7);
      CHECK(row.l0 <= row.m);
      prev = std::max(prev, row.l1);
    }
  }

  TEST_CASE("sessions replay bit-identically") {
    SessionConfig cfg;
    cfg.signal = SignalSpec::exact_sparse(35, 4);
    cfg.rule = StoppingRule::one_step();
    cfg.master_seed = 11;
    cfg.trial_index = 3;
    const SessionResult a = run_session(cfg);
    const SessionResult b = run_session(cfg);
    REQUIRE(a.trace.size() == b.trace.size());
    CHECK(a.m_stop == b.m_stop);
    for (std::size_t i = 0; i < a.trace.size(); ++i) {
      CHECK(a.trace[i].l1 == b.trace[i].l1);
      CHECK(a.trace[i].err2 == b.trace[i].err2);
    }
  }

  TEST_CASE("cold decoding stops at the same time as the warm chain") {
    SessionConfig warm;
    warm.signal = SignalSpec::exact_sparse(30, 4);
    warm.rule = StoppingRule::one_step();
    warm.master_seed = 12;
    SessionConfig cold = warm;
    cold.decoder.kind = DecoderKind::BasisPursuitCold;
    const SessionResult rw = run_session(warm);
    const SessionResult rc = run_session(cold);
    REQUIRE(rw.stopped);
    REQUIRE(rc.stopped);
    CHECK(rw.m_stop == rc.m_stop);
    CHECK((rw.estimate - rw.signal).norm() <= 1e-6);
    CHECK((rc.estimate - rc.signal).norm() <= 1e-6);
  }

  TEST_CASE("a greedy decoder can drive the agreement rule") {
    SessionConfig cfg;
    cfg.signal = SignalSpec::exact_sparse(40, 4);
    cfg.decoder.kind = DecoderKind::Omp;
    cfg.rule = StoppingRule::one_step();
    cfg.master_seed = 13;
    const SessionResult r = run_session(cfg);
    REQUIRE(r.stopped);
    CHECK((r.estimate - r.signal).norm() <= 1e-5);
  }

  TEST_CASE("stride solving skips decodes without breaking the cardinality rule") {
    SessionConfig cfg;
    cfg.signal = SignalSpec::exact_sparse(36, 4);
    cfg.rule = StoppingRule::cardinality();
    cfg.solve_stride = 4;
    cfg.master_seed = 14;
    const SessionResult r = run_session(cfg);
    REQUIRE(r.stopped);
    CHECK(r.reason == StopReason::Cardinality);
    CHECK(r.solves < r.m_stop);
    CHECK((r.estimate - r.signal).norm() <= 1e-6);
  }

  TEST_CASE("an error-budget rule stops with a certificate attached") {
    SessionConfig cfg;
    cfg.signal = SignalSpec::exact_sparse(50, 5);
    cfg.rule = StoppingRule::error_below(0.1, CertMethod::ChebyshevCT, 5);
    cfg.rule.cheb_k = 3.0;
    cfg.master_seed = 15;
    const SessionResult r = run_session(cfg);
    REQUIRE(r.stopped);
    CHECK(r.reason == StopReason::ErrorBelow);
    REQUIRE(r.has_certificate);
    CHECK(r.certificate.method == CertMethod::ChebyshevCT);
    CHECK(r.certificate.upper_bound <= 0.1);
    CHECK((r.estimate - r.signal).norm() <= r.certificate.upper_bound + 1e-9);
  }

  TEST_CASE("a noisy session certifies with the quadratic-sum interval") {
    SessionConfig cfg;
    cfg.signal = SignalSpec::exact_sparse(60, 5);
    cfg.decoder.kind = DecoderKind::Bpdn;
    cfg.decoder.lambda_c = 0.01;
    cfg.decoder.convergence_tol = 1e-6;
    cfg.noise_sigma = 0.01;
    cfg.rule = StoppingRule::error_below(0.25, CertMethod::Chi2, 8);
    cfg.rule.alpha = 0.1;
    cfg.budget = 70;
    cfg.master_seed = 16;
    const SessionResult r = run_session(cfg);
    REQUIRE(r.stopped);
    CHECK(r.reason == StopReason::ErrorBelow);
    REQUIRE(r.has_certificate);
    CHECK(r.certificate.method == CertMethod::Chi2);
    CHECK(r.certificate.upper_bound <= 0.25);
  }
}
