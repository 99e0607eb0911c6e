#pragma once

#include <cstdint>
#include <vector>

#include "seqcs/ensembles.hpp"
#include "seqcs/estimators.hpp"
#include "seqcs/simplex.hpp"
#include "seqcs/types.hpp"

namespace seqcs {

/// True when the reconstruction predicts the new measurement to relative
/// tolerance: |a' xhat - y| <= eps * (1 + |y|).
bool check_agreement(const Vector& xhat, const MeasurementRecord& rec, double eps_agree = 1e-8);

/// Support size of x, counting entries with |x_i| > zero_tol.
int support_size(const Vector& x, double zero_tol);

/// Scale-aware support threshold: 1e-8 * max(1, ||x||_inf).
double default_zero_tol(const Vector& x);

/// True when the reconstruction from num_measurements rows has support
/// strictly smaller than the number of rows.
bool cardinality_stop(const Vector& xhat, int num_measurements, double zero_tol);

/// Probability that t consecutive agreement checks all pass at a point that
/// is not the true signal, for sign-random rows: 2^-t.
double t_step_rule_error_bound(int t);

/// Confidence 1 - N^2 * 2^(1 - M) (clamped to [0, 1]) that a reconstruction
/// from M sign-random rows with support smaller than M is exact.
double bernoulli_cardinality_confidence(int signal_dim, int num_measurements);

enum class DecoderKind { BasisPursuitWarm, BasisPursuitCold, Omp, Bpdn };
enum class StopRuleKind { OneStepAgreement, TStepAgreement, Cardinality, ErrorBelow };
enum class StopReason {
  NotStopped,
  OneStepAgreement,
  TStepAgreement,
  Cardinality,
  ErrorBelow,
  BudgetExhausted,
};

const char* to_string(DecoderKind k);
const char* to_string(StopRuleKind k);
const char* to_string(StopReason r);

struct DecoderConfig {
  DecoderKind kind = DecoderKind::BasisPursuitWarm;
  double residual_tol = 1e-8;     // omp stopping tolerance
  double convergence_tol = 1e-8;  // bpdn optimality tolerance
  double lambda_c = 0.0;          // bpdn schedule scale; required for Bpdn
  int max_iterations = 200000;    // bpdn iteration cap
};

struct StoppingRule {
  StopRuleKind kind = StopRuleKind::OneStepAgreement;
  int t_steps = 1;          // agreement streak length for TStepAgreement
  double eps_agree = 1e-8;  // relative agreement tolerance
  // ErrorBelow parameters:
  double error_tol = 0.0;  // stop when the certified bound is at or below this
  CertMethod certifier = CertMethod::ChebyshevCT;  // ChebyshevCT or Chi2
  int holdout = 5;                                 // rows reserved per certificate
  double cheb_k = 3.0;
  double alpha = 0.1;

  static StoppingRule one_step(double eps = 1e-8);
  static StoppingRule t_step(int t, double eps = 1e-8);
  static StoppingRule cardinality();
  static StoppingRule error_below(double tol, CertMethod method, int holdout);
};

struct SessionConfig {
  SignalSpec signal = SignalSpec::exact_sparse(100, 10);
  EnsembleKind ensemble = EnsembleKind::GaussianStdNormal;
  DecoderConfig decoder;
  StoppingRule rule;
  double noise_sigma = 0.0;
  int budget = 0;  // maximum measurements; 0 means signal_dim + 10
  std::uint64_t master_seed = 1;
  std::uint64_t trial_index = 0;
  int solve_stride = 1;      // for Cardinality/ErrorBelow: decode every k-th row
  bool track_error = true;   // record ||xhat - x||_2 against the known signal
};

/// One row per acquired measurement.
struct TraceRow {
  int m = 0;            // measurements acquired so far
  int l0 = 0;           // support size of the current reconstruction
  double l1 = 0.0;      // l1 norm of the current reconstruction
  double err2 = 0.0;    // ||xhat - x||_2 when tracked, NaN otherwise
  bool agreed = false;  // this measurement passed the agreement check
  bool stopped = false;
};

struct SessionResult {
  bool stopped = false;
  StopReason reason = StopReason::NotStopped;
  int m_stop = 0;                 // total measurements drawn, confirmation included
  int confirmation_overhead = 0;  // rows spent confirming rather than fitting
  Vector estimate;
  Vector signal;
  std::vector<TraceRow> trace;
  int solves = 0;
  IterationCounts lp_iterations;
  int warm_fallbacks = 0;
  bool has_certificate = false;
  ErrorCertificate certificate;  // the certificate that triggered ErrorBelow
};

/// Run one sequential acquisition session: draw rows one at a time, decode,
/// and stop per the configured rule. Deterministic in (master_seed,
/// trial_index).
SessionResult run_session(const SessionConfig& config);

}  // namespace seqcs
