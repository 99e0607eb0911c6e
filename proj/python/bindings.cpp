#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <optional>
#include <string>

#include "seqcs/ensembles.hpp"
#include "seqcs/errors.hpp"
#include "seqcs/estimators.hpp"
#include "seqcs/linalg.hpp"
#include "seqcs/random.hpp"
#include "seqcs/sequential.hpp"
#include "seqcs/simplex.hpp"
#include "seqcs/solvers.hpp"
#include "seqcs/stats.hpp"

namespace py = pybind11;
using namespace seqcs;

namespace {

EnsembleKind parse_ensemble(const std::string& s) {
  if (s == "gaussian") return EnsembleKind::GaussianStdNormal;
  if (s == "bernoulli") return EnsembleKind::BernoulliPM1;
  throw ConfigError("ensemble must be 'gaussian' or 'bernoulli', got '" + s + "'");
}

DecoderKind parse_decoder(const std::string& s) {
  if (s == "bp_warm") return DecoderKind::BasisPursuitWarm;
  if (s == "bp_cold") return DecoderKind::BasisPursuitCold;
  if (s == "omp") return DecoderKind::Omp;
  if (s == "bpdn") return DecoderKind::Bpdn;
  throw ConfigError("decoder must be one of bp_warm|bp_cold|omp|bpdn, got '" + s + "'");
}

CertMethod parse_certifier(const std::string& s) {
  if (s == "chebyshev") return CertMethod::ChebyshevCT;
  if (s == "chi_square") return CertMethod::Chi2;
  throw ConfigError("certifier must be 'chebyshev' or 'chi_square', got '" + s + "'");
}

SignalSpec make_signal_spec(const std::string& kind, int dim, int sparsity, double exponent) {
  if (kind == "exact_sparse") return SignalSpec::exact_sparse(dim, sparsity);
  if (kind == "power_law") return SignalSpec::power_law(dim, exponent);
  throw ConfigError("signal kind must be 'exact_sparse' or 'power_law', got '" + kind + "'");
}

StoppingRule make_rule(const std::string& kind, int t_steps, double eps_agree, double error_tol,
                       const std::string& certifier, int holdout, double cheb_k, double alpha) {
  StoppingRule r;
  if (kind == "one_step") {
    r = StoppingRule::one_step(eps_agree);
  } else if (kind == "t_step") {
    r = StoppingRule::t_step(t_steps, eps_agree);
  } else if (kind == "cardinality") {
    r = StoppingRule::cardinality();
  } else if (kind == "error_below") {
    r = StoppingRule::error_below(error_tol, parse_certifier(certifier), holdout);
    r.cheb_k = cheb_k;
    r.alpha = alpha;
  } else {
    throw ConfigError("rule must be one of one_step|t_step|cardinality|error_below, got '" +
                      kind + "'");
  }
  return r;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Sequential compressed sensing: incremental decoding, stopping rules, and "
      "holdout error certificates.";

  m.def("version", [] {
#ifdef SEQCS_VERSION
    return std::string(SEQCS_VERSION);
#else
    return std::string("0.0.0");
#endif
  });

  // ------------------------------------------------------------ signals/rows
  m.def(
      "exact_sparse_signal",
      [](int dim, int sparsity, std::uint64_t seed) {
        return generate_signal(SignalSpec::exact_sparse(dim, sparsity), seed);
      },
      py::arg("dim"), py::arg("sparsity"), py::arg("seed") = 1,
      "Signal with exactly `sparsity` standard-normal entries at seeded positions.");
  m.def(
      "power_law_signal",
      [](int dim, double exponent, std::uint64_t seed) {
        return generate_signal(SignalSpec::power_law(dim, exponent), seed);
      },
      py::arg("dim"), py::arg("exponent") = 1.0, py::arg("seed") = 1,
      "Compressible signal whose sorted magnitudes decay as (i+1)^-exponent.");
  m.def(
      "measurement_matrix",
      [](const std::string& ensemble, int rows, int dim, std::uint64_t seed) {
        const EnsembleKind kind = parse_ensemble(ensemble);
        RngStream stream(seed);
        Matrix a(rows, dim);
        for (int i = 0; i < rows; ++i) a.row(i) = draw_row(kind, dim, stream).transpose();
        return a;
      },
      py::arg("ensemble"), py::arg("rows"), py::arg("dim"), py::arg("seed") = 1,
      "Stack of measurement rows from the 'gaussian' or 'bernoulli' ensemble.");

  // ------------------------------------------------------------ linalg
  m.def("min_norm_solution", &linalg::min_norm_solution, py::arg("a"), py::arg("b"),
        "Minimum-l2-norm solution of a x = b for a full-row-rank a.");
  m.def("affine_distance", &linalg::affine_distance, py::arg("a"), py::arg("y"), py::arg("xhat"),
        "Euclidean distance from xhat to the solution set of a x = y.");
  m.def("mutual_coherence", &linalg::mutual_coherence, py::arg("a"),
        "Largest normalized inner product between distinct columns.");

  // ------------------------------------------------------------ decoders
  py::class_<IterationCounts>(m, "IterationCounts")
      .def_readonly("phase1", &IterationCounts::phase1)
      .def_readonly("phase2", &IterationCounts::phase2)
      .def("total", &IterationCounts::total);

  py::class_<SolveReport>(m, "SolveReport")
      .def_readonly("solution", &SolveReport::solution)
      .def_readonly("objective", &SolveReport::objective)
      .def_readonly("iterations", &SolveReport::iterations)
      .def_readonly("warm_fallback_to_cold", &SolveReport::warm_fallback_to_cold)
      .def_property_readonly(
          "status", [](const SolveReport& r) { return std::string(to_string(r.status)); });

  m.def(
      "basis_pursuit",
      [](const Matrix& a, const Vector& y) { return basis_pursuit(a, y); }, py::arg("a"),
      py::arg("y"), "Minimum-l1 solution of a x = y via the revised simplex method.");

  py::class_<SequentialBasisPursuit>(m, "SequentialBasisPursuit",
                                     "Basis pursuit that re-optimizes from the previous basis "
                                     "when measurement rows are appended.")
      .def(py::init<int>(), py::arg("signal_dim"))
      .def(
          "solve",
          [](SequentialBasisPursuit& s, const Matrix& a, const Vector& y) { return s.solve(a, y); },
          py::arg("a"), py::arg("y"))
      .def(
          "add_row",
          [](SequentialBasisPursuit& s, const Vector& row, double value) {
            return s.add_row(row, value);
          },
          py::arg("row"), py::arg("value"))
      .def("rows", &SequentialBasisPursuit::rows)
      .def("signal_dim", &SequentialBasisPursuit::signal_dim)
      .def("has_state", &SequentialBasisPursuit::has_state)
      .def("solution", [](const SequentialBasisPursuit& s) { return s.solution(); });

  m.def("omp", &omp, py::arg("a"), py::arg("y"), py::arg("residual_tol") = 1e-8,
        "Greedy support selection with least-squares refits.");

  py::class_<BpdnReport>(m, "BpdnReport")
      .def_readonly("solution", &BpdnReport::solution)
      .def_readonly("objective", &BpdnReport::objective)
      .def_readonly("iterations", &BpdnReport::iterations);

  m.def(
      "bpdn",
      [](const Matrix& a, const Vector& y, double lambda, double convergence_tol,
         int max_iterations, std::optional<Vector> x0) {
        BpdnOptions opts;
        opts.convergence_tol = convergence_tol;
        opts.max_iterations = max_iterations;
        if (x0) opts.x0 = std::move(*x0);
        return bpdn(a, y, lambda, opts);
      },
      py::arg("a"), py::arg("y"), py::arg("lam"), py::arg("convergence_tol") = 1e-8,
      py::arg("max_iterations") = 200000, py::arg("x0") = std::nullopt,
      "l1-penalized least squares via proximal gradient with backtracking.");

  m.def("lambda_schedule", &lambda_schedule, py::arg("m"), py::arg("n"), py::arg("c"),
        "Penalty schedule c * sqrt(m * log n) for the noisy decoder.");

  // ------------------------------------------------------------ statistics
  m.def("chi2_cdf", &stats::chi2_cdf, py::arg("x"), py::arg("dof"));
  m.def("chi2_pdf", &stats::chi2_pdf, py::arg("x"), py::arg("dof"));
  m.def("chi2_quantile", &stats::chi2_quantile, py::arg("p"), py::arg("dof"));

  py::class_<stats::MomentReport>(m, "MomentReport")
      .def_readonly("count", &stats::MomentReport::count)
      .def_readonly("sample_mean", &stats::MomentReport::sample_mean)
      .def_readonly("sample_variance", &stats::MomentReport::sample_variance)
      .def_readonly("closed_form", &stats::MomentReport::closed_form)
      .def_readonly("abs_deviation", &stats::MomentReport::abs_deviation)
      .def_readonly("rel_deviation", &stats::MomentReport::rel_deviation)
      .def_readonly("standard_error", &stats::MomentReport::standard_error);

  py::class_<stats::CtMomentReport>(m, "CtMomentReport")
      .def_readonly("l", &stats::CtMomentReport::l)
      .def_readonly("t", &stats::CtMomentReport::t)
      .def_readonly("count", &stats::CtMomentReport::count)
      .def_readonly("sample_mean", &stats::CtMomentReport::sample_mean)
      .def_readonly("sample_variance", &stats::CtMomentReport::sample_variance)
      .def_readonly("mean_estimate", &stats::CtMomentReport::mean_estimate)
      .def_readonly("mean_bound", &stats::CtMomentReport::mean_bound)
      .def_readonly("var_bound", &stats::CtMomentReport::var_bound)
      .def_readonly("se_mean", &stats::CtMomentReport::se_mean)
      .def_readonly("se_variance", &stats::CtMomentReport::se_variance);

  m.def("sample_ct", &stats::sample_ct, py::arg("l"), py::arg("t"), py::arg("n_samples"),
        py::arg("seed"),
        "Monte Carlo moments of the holdout amplification factor C_T = ||h|| / ||h_1..T||.");

  py::class_<stats::Sin2Identities>(m, "Sin2Identities")
      .def_readonly("sin2", &stats::Sin2Identities::sin2)
      .def_readonly("inv_sin2", &stats::Sin2Identities::inv_sin2);

  m.def("verify_sin2_identities", &stats::verify_sin2_identities, py::arg("l"), py::arg("t"),
        py::arg("n_samples"), py::arg("seed"));

  // ------------------------------------------------------------ certificates
  m.def("ct_mean_estimate", &ct_mean_estimate, py::arg("l"), py::arg("t"));
  m.def("ct_mean_bound", &ct_mean_bound, py::arg("l"), py::arg("t"));
  m.def("ct_var_bound", &ct_var_bound, py::arg("l"), py::arg("t"));

  py::class_<ErrorCertificate>(m, "ErrorCertificate")
      .def_readonly("point_estimate", &ErrorCertificate::point_estimate)
      .def_readonly("upper_bound", &ErrorCertificate::upper_bound)
      .def_readonly("confidence", &ErrorCertificate::confidence)
      .def_readonly("holdout", &ErrorCertificate::holdout)
      .def_readonly("noise_sigma", &ErrorCertificate::noise_sigma)
      .def_readonly("parameter", &ErrorCertificate::parameter)
      .def_readonly("below_noise_floor", &ErrorCertificate::below_noise_floor)
      .def_property_readonly(
          "method", [](const ErrorCertificate& c) { return std::string(to_string(c.method)); });

  m.def("chebyshev_bound", &chebyshev_bound, py::arg("holdout_distance"), py::arg("l"),
        py::arg("t"), py::arg("k"),
        "Distribution-free error bound from the holdout distance, confidence 1 - 1/k^2.");
  m.def("certify_chebyshev", &certify_chebyshev, py::arg("a_all"), py::arg("y_all"),
        py::arg("xhat"), py::arg("t"), py::arg("k"),
        "Chebyshev certificate from a stacked system whose last t rows are the holdout.");
  m.def(
      "chi2_interval",
      [](const Vector& deviations, double alpha, double noise_sigma, double row_variance) {
        return chi2_interval(HoldoutBatch::from_deviations(deviations), alpha, noise_sigma,
                             row_variance);
      },
      py::arg("deviations"), py::arg("alpha"), py::arg("noise_sigma") = 0.0,
      py::arg("row_variance") = 1.0,
      "Chi-square tail certificate from holdout deviations z_i = a_i' xhat - y_i.");
  m.def(
      "jl_style_estimate",
      [](const Vector& deviations) {
        return jl_style_estimate(HoldoutBatch::from_deviations(deviations));
      },
      py::arg("deviations"), "Point estimate sqrt(Z / t) from the holdout deviations.");
  m.def("sin_theta_point_estimate", &sin_theta_point_estimate, py::arg("a_all"), py::arg("y_all"),
        py::arg("xhat"), py::arg("l"), py::arg("t"),
        "Angle-aware point estimate sqrt(l / t) times the holdout distance.");

  // ------------------------------------------------------------ sessions
  py::class_<TraceRow>(m, "TraceRow")
      .def_readonly("m", &TraceRow::m)
      .def_readonly("l0", &TraceRow::l0)
      .def_readonly("l1", &TraceRow::l1)
      .def_readonly("err2", &TraceRow::err2)
      .def_readonly("agreed", &TraceRow::agreed)
      .def_readonly("stopped", &TraceRow::stopped);

  py::class_<SessionResult>(m, "SessionResult")
      .def_readonly("stopped", &SessionResult::stopped)
      .def_readonly("m_stop", &SessionResult::m_stop)
      .def_readonly("confirmation_overhead", &SessionResult::confirmation_overhead)
      .def_readonly("estimate", &SessionResult::estimate)
      .def_readonly("signal", &SessionResult::signal)
      .def_readonly("trace", &SessionResult::trace)
      .def_readonly("solves", &SessionResult::solves)
      .def_readonly("warm_fallbacks", &SessionResult::warm_fallbacks)
      .def_readonly("has_certificate", &SessionResult::has_certificate)
      .def_readonly("certificate", &SessionResult::certificate)
      .def_property_readonly(
          "reason", [](const SessionResult& r) { return std::string(to_string(r.reason)); });

  m.def(
      "run_session",
      [](int dim, int sparsity, const std::string& signal_kind, double exponent,
         const std::string& ensemble, const std::string& decoder, const std::string& rule,
         int t_steps, double eps_agree, double error_tol, const std::string& certifier,
         int holdout, double cheb_k, double alpha, double noise_sigma, double lambda_c,
         int budget, int solve_stride, std::uint64_t seed, std::uint64_t trial) {
        SessionConfig cfg;
        cfg.signal = make_signal_spec(signal_kind, dim, sparsity, exponent);
        cfg.ensemble = parse_ensemble(ensemble);
        cfg.decoder.kind = parse_decoder(decoder);
        cfg.decoder.lambda_c = lambda_c;
        cfg.rule = make_rule(rule, t_steps, eps_agree, error_tol, certifier, holdout, cheb_k,
                             alpha);
        cfg.noise_sigma = noise_sigma;
        cfg.budget = budget;
        cfg.solve_stride = solve_stride;
        cfg.master_seed = seed;
        cfg.trial_index = trial;
        return run_session(cfg);
      },
      py::arg("dim"), py::arg("sparsity") = 10, py::arg("signal_kind") = "exact_sparse",
      py::arg("exponent") = 1.0, py::arg("ensemble") = "gaussian", py::arg("decoder") = "bp_warm",
      py::arg("rule") = "one_step", py::arg("t_steps") = 1, py::arg("eps_agree") = 1e-8,
      py::arg("error_tol") = 0.0, py::arg("certifier") = "chebyshev", py::arg("holdout") = 5,
      py::arg("cheb_k") = 3.0, py::arg("alpha") = 0.1, py::arg("noise_sigma") = 0.0,
      py::arg("lambda_c") = 0.0, py::arg("budget") = 0, py::arg("solve_stride") = 1,
      py::arg("seed") = 1, py::arg("trial") = 0,
      "Acquire measurements one at a time, decode, and stop per the chosen rule.");
}
