#include "seqcs/sequential.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <optional>
#include <utility>

#include "seqcs/errors.hpp"
#include "seqcs/linalg.hpp"
#include "seqcs/random.hpp"
#include "seqcs/solvers.hpp"

namespace seqcs {

bool check_agreement(const Vector& xhat, const MeasurementRecord& rec, double eps_agree) {
  if (rec.row.size() != xhat.size()) {
    throw ConfigError("agreement check: row dimension does not match the reconstruction");
  }
  if (!(eps_agree > 0.0)) throw ConfigError("agreement tolerance must be positive");
  const double predicted = rec.row.dot(xhat);
  return std::abs(predicted - rec.value) <= eps_agree * (1.0 + std::abs(rec.value));
}

int support_size(const Vector& x, double zero_tol) {
  int count = 0;
  for (int i = 0; i < x.size(); ++i) {
    if (std::abs(x[i]) > zero_tol) ++count;
  }
  return count;
}

double default_zero_tol(const Vector& x) {
  return 1e-8 * std::max(1.0, x.size() > 0 ? x.lpNorm<Eigen::Infinity>() : 1.0);
}

bool cardinality_stop(const Vector& xhat, int num_measurements, double zero_tol) {
  if (num_measurements < 1) throw ConfigError("cardinality rule needs at least one measurement");
  return support_size(xhat, zero_tol) < num_measurements;
}

double t_step_rule_error_bound(int t) {
  if (t < 1) throw ConfigError("agreement streak length must be at least 1");
  return std::exp2(-static_cast<double>(t));
}

double bernoulli_cardinality_confidence(int signal_dim, int num_measurements) {
  if (signal_dim < 1) throw ConfigError("signal dimension must be at least 1");
  if (num_measurements < 1) throw ConfigError("measurement count must be at least 1");
  const double exponent = 1.0 - static_cast<double>(num_measurements) +
                          2.0 * std::log2(static_cast<double>(signal_dim));
  if (exponent >= 0.0) return 0.0;  // failure mass at or above 1
  return std::max(0.0, 1.0 - std::exp2(exponent));
}

const char* to_string(DecoderKind k) {
  switch (k) {
    case DecoderKind::BasisPursuitWarm:
      return "bp_warm";
    case DecoderKind::BasisPursuitCold:
      return "bp_cold";
    case DecoderKind::Omp:
      return "omp";
    case DecoderKind::Bpdn:
      return "bpdn";
  }
  return "unknown";
}

const char* to_string(StopRuleKind k) {
  switch (k) {
    case StopRuleKind::OneStepAgreement:
      return "one_step_agreement";
    case StopRuleKind::TStepAgreement:
      return "t_step_agreement";
    case StopRuleKind::Cardinality:
      return "cardinality";
    case StopRuleKind::ErrorBelow:
      return "error_below";
  }
  return "unknown";
}

const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::NotStopped:
      return "";
    case StopReason::OneStepAgreement:
      return "one_step_agreement";
    case StopReason::TStepAgreement:
      return "t_step_agreement";
    case StopReason::Cardinality:
      return "cardinality";
    case StopReason::ErrorBelow:
      return "error_below";
    case StopReason::BudgetExhausted:
      return "budget_exhausted";
  }
  return "unknown";
}

StoppingRule StoppingRule::one_step(double eps) {
  StoppingRule r;
  r.kind = StopRuleKind::OneStepAgreement;
  r.t_steps = 1;
  r.eps_agree = eps;
  return r;
}

StoppingRule StoppingRule::t_step(int t, double eps) {
  StoppingRule r;
  r.kind = StopRuleKind::TStepAgreement;
  r.t_steps = t;
  r.eps_agree = eps;
  return r;
}

StoppingRule StoppingRule::cardinality() {
  StoppingRule r;
  r.kind = StopRuleKind::Cardinality;
  return r;
}

StoppingRule StoppingRule::error_below(double tol, CertMethod method, int holdout) {
  StoppingRule r;
  r.kind = StopRuleKind::ErrorBelow;
  r.error_tol = tol;
  r.certifier = method;
  r.holdout = holdout;
  return r;
}

namespace {

void validate(const SessionConfig& cfg) {
  if (cfg.solve_stride < 1) throw ConfigError("solve_stride must be at least 1");
  if (cfg.noise_sigma < 0.0) throw ConfigError("noise level must be nonnegative");
  if (cfg.budget < 0) throw ConfigError("budget must be nonnegative");
  if (cfg.decoder.kind == DecoderKind::Bpdn && !(cfg.decoder.lambda_c > 0.0)) {
    throw ConfigError("the bpdn decoder requires a positive lambda schedule scale");
  }
  const StoppingRule& rule = cfg.rule;
  if (rule.kind == StopRuleKind::TStepAgreement && rule.t_steps < 1) {
    throw ConfigError("t_steps must be at least 1");
  }
  if (!(rule.eps_agree > 0.0)) throw ConfigError("agreement tolerance must be positive");
  if (rule.kind == StopRuleKind::ErrorBelow) {
    if (!(rule.error_tol > 0.0)) throw ConfigError("error_below needs a positive tolerance");
    if (rule.holdout < 1) throw ConfigError("certificate holdout must be at least 1");
    if (rule.certifier == CertMethod::ChebyshevCT && rule.holdout <= 2) {
      throw ConfigError("the Chebyshev certifier needs a holdout larger than 2");
    }
    if (rule.certifier != CertMethod::ChebyshevCT && rule.certifier != CertMethod::Chi2) {
      throw ConfigError("error_below supports the Chebyshev and chi-square certifiers");
    }
    if (!(rule.alpha > 0.0 && rule.alpha < 1.0)) throw ConfigError("alpha must be in (0, 1)");
    if (!(rule.cheb_k > 0.0)) throw ConfigError("cheb_k must be positive");
  }
}

struct Candidate {
  int m0 = 0;  // rows the candidate was decoded from
  Vector xhat;
};

}  // namespace

SessionResult run_session(const SessionConfig& cfg) {
  validate(cfg);
  const int n = cfg.signal.dim;
  const int budget = cfg.budget > 0 ? cfg.budget : n + 10;
  const bool agreement_rule = cfg.rule.kind == StopRuleKind::OneStepAgreement ||
                              cfg.rule.kind == StopRuleKind::TStepAgreement;
  const int required_streak =
      cfg.rule.kind == StopRuleKind::OneStepAgreement ? 1 : cfg.rule.t_steps;

  const Vector signal =
      generate_signal(cfg.signal, derive_stream_seed(cfg.master_seed, cfg.trial_index * 4));
  RngStream stream(cfg.master_seed, cfg.trial_index * 4 + 1);

  Matrix a(budget, n);
  Vector y(budget);

  SessionResult result;
  result.signal = signal;
  result.trace.reserve(budget);

  std::optional<SequentialBasisPursuit> warm;
  int rows_in_lp = 0;
  Vector xhat;
  bool have_xhat = false;
  int agree_streak = 0;
  std::deque<Candidate> candidates;

  auto decode = [&](int m) {
    switch (cfg.decoder.kind) {
      case DecoderKind::BasisPursuitWarm: {
        SolveReport report;
        if (!warm.has_value() || !warm->has_state()) {
          warm.emplace(n);
          report = warm->solve(a.topRows(m), y.head(m));
          rows_in_lp = m;
        } else {
          while (rows_in_lp < m) {
            report = warm->add_row(a.row(rows_in_lp).transpose(), y[rows_in_lp]);
            ++rows_in_lp;
            if (report.warm_fallback_to_cold) ++result.warm_fallbacks;
            if (report.status != SolveStatus::Optimal) break;
          }
        }
        result.lp_iterations.phase1 += report.iterations.phase1;
        result.lp_iterations.phase2 += report.iterations.phase2;
        if (report.status != SolveStatus::Optimal) {
          throw Error(std::string("sequential decode: LP finished ") +
                      to_string(report.status));
        }
        xhat = warm->solution();
        break;
      }
      case DecoderKind::BasisPursuitCold: {
        const SolveReport report = basis_pursuit(a.topRows(m), y.head(m));
        result.lp_iterations.phase1 += report.iterations.phase1;
        result.lp_iterations.phase2 += report.iterations.phase2;
        if (report.status != SolveStatus::Optimal) {
          throw Error(std::string("sequential decode: LP finished ") +
                      to_string(report.status));
        }
        xhat = report.solution;
        break;
      }
      case DecoderKind::Omp:
        xhat = omp(a.topRows(m), y.head(m), cfg.decoder.residual_tol);
        break;
      case DecoderKind::Bpdn: {
        BpdnOptions opts;
        opts.convergence_tol = cfg.decoder.convergence_tol;
        opts.max_iterations = cfg.decoder.max_iterations;
        if (have_xhat) opts.x0 = xhat;
        const double lam = lambda_schedule(m, n, cfg.decoder.lambda_c);
        xhat = bpdn(a.topRows(m), y.head(m), lam, opts).solution;
        break;
      }
    }
    have_xhat = true;
    ++result.solves;
  };

  // Certify the oldest candidates whose holdout rows are now all available;
  // returns true when one meets the error tolerance.
  auto try_certify = [&](int m) {
    const int t = cfg.rule.holdout;
    while (!candidates.empty() && candidates.front().m0 + t <= m) {
      const Candidate cand = std::move(candidates.front());
      candidates.pop_front();
      const int total = cand.m0 + t;
      ErrorCertificate cert;
      if (cfg.rule.certifier == CertMethod::ChebyshevCT) {
        cert = certify_chebyshev(a.topRows(total), y.head(total), cand.xhat, t, cfg.rule.cheb_k);
      } else {
        Vector z(t);
        for (int i = 0; i < t; ++i) {
          z[i] = a.row(cand.m0 + i).dot(cand.xhat) - y[cand.m0 + i];
        }
        cert = chi2_interval(HoldoutBatch::from_deviations(std::move(z)), cfg.rule.alpha,
                             cfg.noise_sigma);
      }
      result.certificate = cert;
      result.has_certificate = true;
      if (cert.upper_bound <= cfg.rule.error_tol) {
        result.confirmation_overhead = t;
        return true;
      }
    }
    return false;
  };

  for (int m = 1; m <= budget; ++m) {
    const Vector row = draw_row(cfg.ensemble, n, stream);
    const MeasurementRecord rec = measure(signal, row, cfg.noise_sigma, stream);
    a.row(m - 1) = rec.row.transpose();
    y[m - 1] = rec.value;

    bool agreed = false;
    bool stopped = false;

    if (agreement_rule && have_xhat) {
      agreed = check_agreement(xhat, rec, cfg.rule.eps_agree);
      if (agreed) {
        if (++agree_streak >= required_streak) {
          stopped = true;
          result.reason = cfg.rule.kind == StopRuleKind::OneStepAgreement
                              ? StopReason::OneStepAgreement
                              : StopReason::TStepAgreement;
          result.confirmation_overhead = required_streak;
        }
      } else {
        agree_streak = 0;
      }
    }

    if (!stopped) {
      bool need_solve;
      if (agreement_rule) {
        need_solve = !agreed;
      } else {
        need_solve = (m % cfg.solve_stride == 0) || m == budget || !have_xhat;
      }
      if (need_solve) {
        decode(m);
        if (cfg.rule.kind == StopRuleKind::Cardinality) {
          if (cardinality_stop(xhat, m, default_zero_tol(xhat))) {
            stopped = true;
            result.reason = StopReason::Cardinality;
          }
        } else if (cfg.rule.kind == StopRuleKind::ErrorBelow) {
          candidates.push_back(Candidate{m, xhat});
        }
      }
      if (cfg.rule.kind == StopRuleKind::ErrorBelow && try_certify(m)) {
        stopped = true;
        result.reason = StopReason::ErrorBelow;
      }
    }

    TraceRow tr;
    tr.m = m;
    tr.agreed = agreed;
    tr.stopped = stopped;
    if (have_xhat) {
      tr.l0 = support_size(xhat, default_zero_tol(xhat));
      tr.l1 = xhat.lpNorm<1>();
      tr.err2 = cfg.track_error ? (xhat - signal).norm()
                                : std::numeric_limits<double>::quiet_NaN();
    } else {
      tr.err2 = std::numeric_limits<double>::quiet_NaN();
    }
    result.trace.push_back(tr);

    if (stopped) {
      result.stopped = true;
      result.m_stop = m;
      break;
    }
  }

  if (!result.stopped) {
    result.reason = StopReason::BudgetExhausted;
    result.m_stop = budget;
  }
  result.estimate = have_xhat ? xhat : Vector::Zero(n);
  return result;
}

}  // namespace seqcs
