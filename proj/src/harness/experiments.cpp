#include "harness/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <limits>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "harness/csv.hpp"
#include "harness/manifest.hpp"
#include "seqcs/errors.hpp"
#include "seqcs/estimators.hpp"
#include "seqcs/linalg.hpp"
#include "seqcs/random.hpp"
#include "seqcs/sequential.hpp"
#include "seqcs/solvers.hpp"
#include "seqcs/stats.hpp"

namespace seqcs::harness {

namespace fs = std::filesystem;
using nlohmann::json;

int worker_count() {
  if (const char* env = std::getenv("SEQCS_WORKERS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
    return 1;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(std::clamp(hw, 1u, 16u));
}

namespace {

struct TrialFailure {
  int index = 0;
  std::string message;
};

// Runs fn(i) for i in [0, n) striped across the worker pool. Exceptions are
// captured per index so one bad trial never aborts the batch. Output slots
// are preallocated by callers, so results are identical for any worker count.
std::vector<TrialFailure> parallel_trials(int n, const std::function<void(int)>& fn) {
  const int workers = std::min(worker_count(), std::max(n, 1));
  std::vector<TrialFailure> failures;
  std::mutex failures_mutex;
  auto work = [&](int w) {
    for (int i = w; i < n; i += workers) {
      try {
        fn(i);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(failures_mutex);
        failures.push_back({i, e.what()});
      }
    }
  };
  if (workers <= 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  std::sort(failures.begin(), failures.end(),
            [](const TrialFailure& a, const TrialFailure& b) { return a.index < b.index; });
  return failures;
}

void record_trial_seeds(RunManifest& man, std::uint64_t master, int count) {
  man.trial_seeds.resize(count);
  for (int i = 0; i < count; ++i) {
    man.trial_seeds[i] = derive_stream_seed(master, static_cast<std::uint64_t>(i) * 4);
  }
}

std::string flags_string(const ErrorCertificate& cert, bool approximate) {
  std::string flags;
  auto add = [&flags](const char* f) {
    if (!flags.empty()) flags += ';';
    flags += f;
  };
  if (cert.below_noise_floor) add("below_noise_floor");
  if (approximate) add("approximate");
  return flags;
}

double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double m2 = 0.0;
  for (double x : v) m2 += (x - mean) * (x - mean);
  return std::sqrt(m2 / static_cast<double>(v.size() - 1));
}

// ---------------------------------------------------------------- stop_hist

std::vector<TrialFailure> exp_stop_hist(const ExperimentConfig& cfg, RunManifest& man) {
  std::vector<EnsembleKind> ensembles;
  std::vector<std::string> ensemble_names;
  if (cfg.ensemble == "both" || cfg.ensemble == "gaussian") {
    ensembles.push_back(EnsembleKind::GaussianStdNormal);
    ensemble_names.emplace_back("gaussian");
  }
  if (cfg.ensemble == "both" || cfg.ensemble == "bernoulli") {
    ensembles.push_back(EnsembleKind::BernoulliPM1);
    ensemble_names.emplace_back("bernoulli");
  }

  const int per = cfg.trials;
  const int total = per * static_cast<int>(ensembles.size());
  std::vector<int> stops(total, -1);
  std::vector<std::string> reasons(total);
  record_trial_seeds(man, cfg.seed, total);

  auto failures = parallel_trials(total, [&](int idx) {
    const int e = idx / per;
    SessionConfig sc;
    sc.signal = cfg.signal;
    sc.ensemble = ensembles[e];
    sc.decoder = cfg.decoder;
    // Sign-random rows admit exact-agreement coincidences, so they get the
    // multi-step confirmation rule unless the config asks for something else.
    sc.rule = (ensembles[e] == EnsembleKind::BernoulliPM1 &&
               cfg.rule.kind == StopRuleKind::OneStepAgreement)
                  ? StoppingRule::t_step(cfg.rule.t_steps, cfg.rule.eps_agree)
                  : cfg.rule;
    sc.noise_sigma = cfg.noise_sigma;
    sc.budget = cfg.budget;
    sc.master_seed = cfg.seed;
    sc.trial_index = static_cast<std::uint64_t>(idx);
    sc.solve_stride = cfg.solve_stride;
    sc.track_error = false;
    const SessionResult res = run_session(sc);
    stops[idx] = res.m_stop;
    reasons[idx] = to_string(res.reason);
  });

  CsvWriter csv(fs::path(cfg.out_dir) / "stop_hist.csv");
  csv.header({"ensemble", "trial", "M_stop"});
  json summary;
  for (std::size_t e = 0; e < ensembles.size(); ++e) {
    std::vector<double> values;
    int exhausted = 0;
    for (int t = 0; t < per; ++t) {
      const int idx = static_cast<int>(e) * per + t;
      if (stops[idx] < 0) continue;  // failed trial, reported separately
      csv.row({ensemble_names[e], CsvWriter::num(t), CsvWriter::num(stops[idx])});
      values.push_back(stops[idx]);
      if (reasons[idx] == "budget_exhausted") ++exhausted;
    }
    double mean = 0.0;
    for (double v : values) mean += v;
    if (!values.empty()) mean /= static_cast<double>(values.size());
    summary[ensemble_names[e]] = {{"trials", values.size()},
                                  {"mean_stop", mean},
                                  {"std_stop", sample_std(values)},
                                  {"budget_exhausted", exhausted}};
  }
  man.outputs.push_back("stop_hist.csv");
  man.extras["summary"] = summary;
  man.extras["bernoulli_rule"] = "t_step confirmation (see config rule.t_steps)";
  return failures;
}

// -------------------------------------------------------------------- trace

std::vector<TrialFailure> exp_trace(const ExperimentConfig& cfg, RunManifest& man) {
  record_trial_seeds(man, cfg.seed, cfg.trials);
  std::vector<SessionResult> results(cfg.trials);
  std::vector<char> ok(cfg.trials, 0);
  auto failures = parallel_trials(cfg.trials, [&](int t) {
    SessionConfig sc;
    sc.signal = cfg.signal;
    sc.ensemble = cfg.parse_single_ensemble();
    sc.decoder = cfg.decoder;
    sc.rule = cfg.rule;
    sc.noise_sigma = cfg.noise_sigma;
    sc.budget = cfg.budget;
    sc.master_seed = cfg.seed;
    sc.trial_index = static_cast<std::uint64_t>(t);
    sc.solve_stride = cfg.solve_stride;
    results[t] = run_session(sc);
    ok[t] = 1;
  });

  json summary = json::array();
  for (int t = 0; t < cfg.trials; ++t) {
    if (!ok[t]) continue;
    const SessionResult& res = results[t];
    const std::string file = t == 0 ? "trace.csv" : "trace_" + std::to_string(t) + ".csv";
    CsvWriter csv(fs::path(cfg.out_dir) / file);
    csv.header({"M", "l0", "l1", "err2", "agreed", "stopped", "reason"});
    for (const TraceRow& r : res.trace) {
      csv.row({CsvWriter::num(r.m), CsvWriter::num(r.l0), CsvWriter::num(r.l1),
               CsvWriter::num(r.err2), CsvWriter::boolean(r.agreed),
               CsvWriter::boolean(r.stopped), r.stopped ? to_string(res.reason) : ""});
    }
    man.outputs.push_back(file);
    const double final_err = res.trace.empty() ? 0.0 : res.trace.back().err2;
    summary.push_back({{"trial", t},
                       {"m_stop", res.m_stop},
                       {"reason", to_string(res.reason)},
                       {"final_err2", final_err},
                       {"solves", res.solves},
                       {"confirmation_overhead", res.confirmation_overhead}});
  }
  man.extras["sessions"] = summary;
  return failures;
}

// --------------------------------------------------------------- ct_moments

std::vector<TrialFailure> exp_ct_moments(const ExperimentConfig& cfg, RunManifest& man) {
  if (cfg.t_min < 1 || cfg.t_max < cfg.t_min) throw ConfigError("need 1 <= t_min <= t_max");
  if (cfg.l_dim < cfg.t_max) throw ConfigError("l_dim must be at least t_max");
  if (cfg.samples < 100) throw ConfigError("samples must be at least 100");

  const int count = cfg.t_max - cfg.t_min + 1;
  std::vector<stats::CtMomentReport> reports(count);
  record_trial_seeds(man, cfg.seed, count);
  auto failures = parallel_trials(count, [&](int i) {
    const int t = cfg.t_min + i;
    reports[i] = stats::sample_ct(cfg.l_dim, t, cfg.samples,
                                  derive_stream_seed(cfg.seed, static_cast<std::uint64_t>(i)));
  });

  CsvWriter csv(fs::path(cfg.out_dir) / "ct_moments.csv");
  csv.header({"T", "sample_mean", "mean_estimate", "mean_bound", "sample_std", "std_bound"});
  for (int i = 0; i < count; ++i) {
    const auto& r = reports[i];
    if (r.count == 0) continue;  // failed slot
    csv.row({CsvWriter::num(r.t), CsvWriter::num(r.sample_mean), CsvWriter::num(r.mean_estimate),
             CsvWriter::num(r.mean_bound), CsvWriter::num(std::sqrt(r.sample_variance)),
             CsvWriter::num(std::sqrt(std::max(0.0, r.var_bound)))});
  }
  man.outputs.push_back("ct_moments.csv");
  man.extras["l_dim"] = cfg.l_dim;
  man.extras["samples_per_t"] = cfg.samples;
  return failures;
}

// ------------------------------------------------------ certificate helpers

struct CertSweepPoint {
  int m = 0;
  ErrorCertificate cert;
  double actual_err = 0.0;
  bool valid = false;
};

void write_certificates(const ExperimentConfig& cfg, RunManifest& man,
                        const std::vector<std::vector<CertSweepPoint>>& per_trial,
                        bool approximate) {
  for (std::size_t t = 0; t < per_trial.size(); ++t) {
    if (per_trial[t].empty()) continue;
    const std::string cert_file =
        t == 0 ? "certificates.csv" : "certificates_" + std::to_string(t) + ".csv";
    const std::string err_file = t == 0 ? "reconstruction_error.csv"
                                        : "reconstruction_error_" + std::to_string(t) + ".csv";
    CsvWriter cert_csv(fs::path(cfg.out_dir) / cert_file);
    cert_csv.header({"M", "T", "method", "point", "bound", "confidence", "flags"});
    CsvWriter err_csv(fs::path(cfg.out_dir) / err_file);
    err_csv.header({"M", "err2"});
    for (const CertSweepPoint& p : per_trial[t]) {
      if (!p.valid) continue;
      cert_csv.row({CsvWriter::num(p.m), CsvWriter::num(p.cert.holdout),
                    to_string(p.cert.method), CsvWriter::num(p.cert.point_estimate),
                    CsvWriter::num(p.cert.upper_bound), CsvWriter::num(p.cert.confidence),
                    flags_string(p.cert, approximate)});
      err_csv.row({CsvWriter::num(p.m), CsvWriter::num(p.actual_err)});
    }
    man.outputs.push_back(cert_file);
    man.outputs.push_back(err_file);
  }
}

std::vector<int> sweep_points(const ExperimentConfig& cfg) {
  if (cfg.m_min < 1 || cfg.m_max < cfg.m_min) throw ConfigError("need 1 <= m_min <= m_max");
  if (cfg.m_step < 1) throw ConfigError("m_step must be at least 1");
  std::vector<int> points;
  for (int m = cfg.m_min; m <= cfg.m_max; m += cfg.m_step) points.push_back(m);
  return points;
}

// ------------------------------------------------------------- error_bounds

std::vector<TrialFailure> exp_error_bounds(const ExperimentConfig& cfg, RunManifest& man) {
  const std::vector<int> points = sweep_points(cfg);
  const int n = cfg.signal.dim;
  const int t_hold = cfg.holdout;
  if (t_hold <= 2) throw ConfigError("the Chebyshev certifier needs holdout > 2");
  if (cfg.m_max + t_hold > n) {
    throw ConfigError("m_max + holdout must not exceed the signal dimension");
  }
  const EnsembleKind ensemble = cfg.parse_single_ensemble();

  std::vector<std::vector<CertSweepPoint>> per_trial(cfg.trials);
  record_trial_seeds(man, cfg.seed, cfg.trials);

  auto failures = parallel_trials(cfg.trials, [&](int trial) {
    const Vector signal = generate_signal(
        cfg.signal, derive_stream_seed(cfg.seed, static_cast<std::uint64_t>(trial) * 4));
    RngStream stream(cfg.seed, static_cast<std::uint64_t>(trial) * 4 + 1);
    const int total_rows = cfg.m_max + t_hold;
    Matrix a(total_rows, n);
    Vector y(total_rows);
    for (int i = 0; i < total_rows; ++i) {
      const MeasurementRecord rec = measure(signal, draw_row(ensemble, n, stream), 0.0, stream);
      a.row(i) = rec.row.transpose();
      y[i] = rec.value;
    }

    std::vector<CertSweepPoint> out(points.size());
    SequentialBasisPursuit solver(n);
    SolveReport report = solver.solve(a.topRows(cfg.m_min), y.head(cfg.m_min));
    int rows_in = cfg.m_min;
    for (std::size_t pi = 0; pi < points.size(); ++pi) {
      const int m = points[pi];
      while (rows_in < m) {
        report = solver.add_row(a.row(rows_in).transpose(), y[rows_in]);
        ++rows_in;
      }
      if (report.status != SolveStatus::Optimal) {
        throw Error(std::string("decode at M=") + std::to_string(m) + " finished " +
                    to_string(report.status));
      }
      const Vector xhat = solver.solution();
      CertSweepPoint p;
      p.m = m;
      p.cert = certify_chebyshev(a.topRows(m + t_hold), y.head(m + t_hold), xhat, t_hold,
                                 cfg.cheb_k);
      p.actual_err = (xhat - signal).norm();
      p.valid = true;
      out[pi] = p;
    }
    per_trial[trial] = std::move(out);
  });

  write_certificates(cfg, man, per_trial, ensemble == EnsembleKind::BernoulliPM1);
  man.extras["certifier"] = "chebyshev";
  man.extras["cheb_k"] = cfg.cheb_k;
  man.extras["holdout"] = t_hold;
  man.extras["sweep_stride_note"] =
      "sweep m_min/m_max/m_step are desk-scale choices; the source experiment solved at every M";
  return failures;
}

// -------------------------------------------------------- estimator_compare

std::vector<TrialFailure> exp_estimator_compare(const ExperimentConfig& cfg, RunManifest& man) {
  if (cfg.m_values.empty()) throw ConfigError("estimator_compare needs m_values");
  const int n = cfg.signal.dim;
  const int t_hold = cfg.holdout;
  if (t_hold < 1) throw ConfigError("holdout must be at least 1");
  for (int m : cfg.m_values) {
    if (m < 0 || m + t_hold > n) throw ConfigError("each m needs 0 <= m and m + holdout <= dim");
  }
  const EnsembleKind ensemble = cfg.parse_single_ensemble();

  const int per = cfg.trials;
  const int total = per * static_cast<int>(cfg.m_values.size());
  std::vector<double> jl(total, std::numeric_limits<double>::quiet_NaN());
  std::vector<double> st(total, std::numeric_limits<double>::quiet_NaN());
  record_trial_seeds(man, cfg.seed, total);

  auto failures = parallel_trials(total, [&](int idx) {
    const int mi = idx / per;
    const int m = cfg.m_values[mi];
    RngStream stream(cfg.seed, static_cast<std::uint64_t>(idx) * 4 + 1);

    // Fixed error direction: a unit vector drawn uniformly from the part of
    // the space the m fit rows leave undetermined (all of R^n when m = 0).
    const int rows = m + t_hold;
    Matrix a(rows, n);
    for (int i = 0; i < m; ++i) a.row(i) = draw_row(ensemble, n, stream).transpose();
    Vector g(n);
    for (int i = 0; i < n; ++i) g[i] = stream.normal();
    Vector delta = g;
    if (m > 0) {
      const Vector row_component = linalg::min_norm_solution(a.topRows(m), a.topRows(m) * g);
      delta -= row_component;
    }
    delta /= delta.norm();

    for (int i = m; i < rows; ++i) a.row(i) = draw_row(ensemble, n, stream).transpose();
    const Vector y = a * delta;  // xhat = 0, so deviations are -y on the holdout
    jl[idx] = jl_style_estimate(HoldoutBatch::from_deviations(-y.tail(t_hold)));
    st[idx] = sin_theta_point_estimate(a, y, Vector::Zero(n), n - m, t_hold);
  });

  CsvWriter csv(fs::path(cfg.out_dir) / "estimator_compare.csv");
  csv.header({"M", "trial", "jl_estimate", "sin_theta_estimate"});
  json summary;
  for (std::size_t mi = 0; mi < cfg.m_values.size(); ++mi) {
    std::vector<double> jl_ok, st_ok;
    for (int t = 0; t < per; ++t) {
      const int idx = static_cast<int>(mi) * per + t;
      if (std::isnan(jl[idx])) continue;
      csv.row({CsvWriter::num(cfg.m_values[mi]), CsvWriter::num(t), CsvWriter::num(jl[idx]),
               CsvWriter::num(st[idx])});
      jl_ok.push_back(jl[idx]);
      st_ok.push_back(st[idx]);
    }
    const double jl_std = sample_std(jl_ok);
    const double st_std = sample_std(st_ok);
    summary[std::to_string(cfg.m_values[mi])] = {
        {"trials", jl_ok.size()},
        {"jl_std", jl_std},
        {"sin_theta_std", st_std},
        {"relative_gap", jl_std > 0 ? std::abs(jl_std - st_std) / jl_std : 0.0}};
  }
  man.outputs.push_back("estimator_compare.csv");
  man.extras["summary"] = summary;
  man.extras["same_accuracy_tolerance"] =
      "estimators count as comparable when sample stds differ by < 15% relative; "
      "threshold is a harness decision, not a source-figure value";
  return failures;
}

// -------------------------------------------------------------- noisy_bound

std::vector<TrialFailure> exp_noisy_bound(const ExperimentConfig& cfg, RunManifest& man) {
  const std::vector<int> points = sweep_points(cfg);
  const int n = cfg.signal.dim;
  const int t_hold = cfg.holdout;
  if (t_hold < 1) throw ConfigError("holdout must be at least 1");
  if (cfg.decoder.kind != DecoderKind::Bpdn) {
    throw ConfigError("noisy_bound uses the bpdn decoder");
  }
  if (!(cfg.noise_sigma > 0.0)) throw ConfigError("noisy_bound needs noise_sigma > 0");
  const EnsembleKind ensemble = cfg.parse_single_ensemble();

  std::vector<std::vector<CertSweepPoint>> per_trial(cfg.trials);
  record_trial_seeds(man, cfg.seed, cfg.trials);

  auto failures = parallel_trials(cfg.trials, [&](int trial) {
    const Vector signal = generate_signal(
        cfg.signal, derive_stream_seed(cfg.seed, static_cast<std::uint64_t>(trial) * 4));
    RngStream stream(cfg.seed, static_cast<std::uint64_t>(trial) * 4 + 1);
    const int total_rows = cfg.m_max + t_hold;
    Matrix a(total_rows, n);
    Vector y(total_rows);
    for (int i = 0; i < total_rows; ++i) {
      const MeasurementRecord rec =
          measure(signal, draw_row(ensemble, n, stream), cfg.noise_sigma, stream);
      a.row(i) = rec.row.transpose();
      y[i] = rec.value;
    }

    std::vector<CertSweepPoint> out(points.size());
    Vector xhat = Vector::Zero(n);
    for (std::size_t pi = 0; pi < points.size(); ++pi) {
      const int m = points[pi];
      BpdnOptions opts;
      opts.convergence_tol = cfg.decoder.convergence_tol;
      opts.max_iterations = cfg.decoder.max_iterations;
      opts.x0 = xhat;  // continue from the previous sweep point
      const double lam = lambda_schedule(m, n, cfg.decoder.lambda_c);
      xhat = bpdn(a.topRows(m), y.head(m), lam, opts).solution;

      Vector z(t_hold);
      for (int i = 0; i < t_hold; ++i) z[i] = a.row(m + i).dot(xhat) - y[m + i];
      CertSweepPoint p;
      p.m = m;
      p.cert = chi2_interval(HoldoutBatch::from_deviations(std::move(z)), cfg.alpha,
                             cfg.noise_sigma);
      p.actual_err = (xhat - signal).norm();
      p.valid = true;
      out[pi] = p;
    }
    per_trial[trial] = std::move(out);
  });

  write_certificates(cfg, man, per_trial, ensemble == EnsembleKind::BernoulliPM1);
  man.extras["certifier"] = "chi_square";
  man.extras["alpha"] = cfg.alpha;
  man.extras["holdout"] = t_hold;
  man.extras["lambda_c"] = cfg.decoder.lambda_c;
  man.extras["lambda_c_note"] =
      "penalty scale calibrated at desk scale so the reconstruction error approaches the "
      "noise floor over the sweep";
  return failures;
}

// --------------------------------------------------------- warmstart_bench

std::vector<TrialFailure> exp_warmstart_bench(const ExperimentConfig& cfg, RunManifest& man) {
  const int n = cfg.signal.dim;
  if (cfg.m_min < 1 || cfg.m_max <= cfg.m_min) throw ConfigError("need 1 <= m_min < m_max");
  if (cfg.m_max > n) throw ConfigError("m_max must not exceed the signal dimension");
  const EnsembleKind ensemble = cfg.parse_single_ensemble();

  // Per-step comparison starts one past m_min: the chain is initialized with
  // a cold solve at m_min, then each added row is solved both warm (from the
  // previous basis) and cold (from scratch).
  const int first = cfg.m_min + 1;
  const int count = cfg.m_max - first + 1;
  std::vector<std::vector<double>> warm(cfg.trials), cold(cfg.trials);
  record_trial_seeds(man, cfg.seed, cfg.trials);

  auto failures = parallel_trials(cfg.trials, [&](int trial) {
    const Vector signal = generate_signal(
        cfg.signal, derive_stream_seed(cfg.seed, static_cast<std::uint64_t>(trial) * 4));
    RngStream stream(cfg.seed, static_cast<std::uint64_t>(trial) * 4 + 1);
    Matrix a(cfg.m_max, n);
    Vector y(cfg.m_max);
    for (int i = 0; i < cfg.m_max; ++i) {
      const MeasurementRecord rec = measure(signal, draw_row(ensemble, n, stream), 0.0, stream);
      a.row(i) = rec.row.transpose();
      y[i] = rec.value;
    }

    std::vector<double> w(count), c(count);
    SequentialBasisPursuit solver(n);
    SolveReport warm_report = solver.solve(a.topRows(cfg.m_min), y.head(cfg.m_min));
    for (int m = first; m <= cfg.m_max; ++m) {
      warm_report = solver.add_row(a.row(m - 1).transpose(), y[m - 1]);
      const SolveReport cold_report = basis_pursuit(a.topRows(m), y.head(m));
      if (warm_report.status != SolveStatus::Optimal ||
          cold_report.status != SolveStatus::Optimal) {
        throw Error("LP did not reach optimality at M=" + std::to_string(m));
      }
      const double rel_gap = std::abs(warm_report.objective - cold_report.objective) /
                             std::max(1.0, std::abs(cold_report.objective));
      if (rel_gap > 1e-7) {
        throw Error("warm and cold objectives disagree at M=" + std::to_string(m) +
                    " (relative gap " + std::to_string(rel_gap) + ")");
      }
      w[m - first] = warm_report.iterations.total();
      c[m - first] = cold_report.iterations.total();
    }
    warm[trial] = std::move(w);
    cold[trial] = std::move(c);
  });

  CsvWriter csv(fs::path(cfg.out_dir) / "warmstart_bench.csv");
  csv.header({"M", "mean_iters_cold", "mean_iters_warm"});
  double top_half_warm = 0.0, top_half_cold = 0.0;
  int top_half_points = 0;
  const int mid = first + count / 2;
  for (int i = 0; i < count; ++i) {
    double sw = 0.0, sc = 0.0;
    int ok = 0;
    for (int t = 0; t < cfg.trials; ++t) {
      if (warm[t].empty()) continue;
      sw += warm[t][i];
      sc += cold[t][i];
      ++ok;
    }
    if (ok == 0) continue;
    const double mean_w = sw / ok;
    const double mean_c = sc / ok;
    csv.row({CsvWriter::num(first + i), CsvWriter::num(mean_c), CsvWriter::num(mean_w)});
    if (first + i >= mid) {
      top_half_warm += mean_w;
      top_half_cold += mean_c;
      ++top_half_points;
    }
  }
  man.outputs.push_back("warmstart_bench.csv");
  if (top_half_points > 0) {
    man.extras["top_half_mean_warm"] = top_half_warm / top_half_points;
    man.extras["top_half_mean_cold"] = top_half_cold / top_half_points;
  }
  man.extras["note"] = "iteration counts are pivot counts (phase 1 + phase 2)";
  return failures;
}

}  // namespace

int run_experiment(const ExperimentConfig& cfg) {
  fs::create_directories(cfg.out_dir);

  RunManifest man;
  man.name = cfg.name;
  man.experiment = cfg.experiment;
  man.version = toolkit_version();
  man.config = cfg.to_json();
  man.master_seed = cfg.seed;
  man.workers = worker_count();
  man.status = "running";
  man.write(cfg.out_dir);

  const auto start = std::chrono::steady_clock::now();
  std::vector<TrialFailure> failures;
  if (cfg.experiment == "stop_hist") {
    failures = exp_stop_hist(cfg, man);
  } else if (cfg.experiment == "trace") {
    failures = exp_trace(cfg, man);
  } else if (cfg.experiment == "ct_moments") {
    failures = exp_ct_moments(cfg, man);
  } else if (cfg.experiment == "error_bounds") {
    failures = exp_error_bounds(cfg, man);
  } else if (cfg.experiment == "estimator_compare") {
    failures = exp_estimator_compare(cfg, man);
  } else if (cfg.experiment == "noisy_bound") {
    failures = exp_noisy_bound(cfg, man);
  } else if (cfg.experiment == "warmstart_bench") {
    failures = exp_warmstart_bench(cfg, man);
  } else {
    throw ConfigError("unknown experiment '" + cfg.experiment + "'");
  }
  const auto end = std::chrono::steady_clock::now();

  man.wall_ms = std::chrono::duration<double, std::milli>(end - start).count();
  man.status = failures.empty() ? "complete" : "failed";
  json failure_list = json::array();
  for (const TrialFailure& f : failures) {
    failure_list.push_back({{"trial", f.index}, {"message", f.message}});
  }
  man.extras["failures"] = failure_list;
  man.write(cfg.out_dir);
  return failures.empty() ? 0 : 3;
}

}  // namespace seqcs::harness
