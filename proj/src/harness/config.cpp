#include "harness/config.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "seqcs/errors.hpp"

namespace seqcs::harness {

const char* toolkit_version() { return "0.1.0"; }

namespace {

using nlohmann::json;

const std::map<std::string, std::pair<const char*, const char*>>& preset_table() {
  // name -> (description, JSON text). Defaults follow the source experiments'
  // published parameters; sweep strides are desk-scale choices recorded in
  // each run's manifest.
  static const std::map<std::string, std::pair<const char*, const char*>> table = {
      {"fig1",
       {"Stop-time histogram, N=100 K=10, 500 trials per ensemble",
        R"({
          "experiment": "stop_hist",
          "trials": 500,
          "ensemble": "both",
          "signal": {"kind": "exact_sparse", "dim": 100, "sparsity": 10},
          "decoder": {"kind": "bp_warm"},
          "rule": {"kind": "one_step", "t_steps": 4}
        })"}},
      {"fig3",
       {"Single-trial trace of support size, l1 mass, and error vs M",
        R"({
          "experiment": "trace",
          "trials": 1,
          "ensemble": "gaussian",
          "signal": {"kind": "exact_sparse", "dim": 100, "sparsity": 10},
          "decoder": {"kind": "bp_warm"},
          "rule": {"kind": "one_step"}
        })"}},
      {"fig4",
       {"Holdout amplification factor: sample moments vs closed forms, L=100",
        R"({
          "experiment": "ct_moments",
          "l_dim": 100,
          "t_min": 3,
          "t_max": 50,
          "samples": 5000
        })"}},
      {"fig5a",
       {"Chebyshev error bounds along a sparse-signal run, N=100 K=10 T=5",
        R"({
          "experiment": "error_bounds",
          "trials": 1,
          "ensemble": "gaussian",
          "signal": {"kind": "exact_sparse", "dim": 100, "sparsity": 10},
          "decoder": {"kind": "bp_warm"},
          "holdout": 5,
          "cheb_k": 3.0,
          "m_min": 10,
          "m_max": 60,
          "m_step": 1
        })"}},
      {"fig5b",
       {"Chebyshev error bounds for a power-law signal, N=1000 T=10",
        R"({
          "experiment": "error_bounds",
          "trials": 1,
          "ensemble": "gaussian",
          "signal": {"kind": "power_law", "dim": 1000, "exponent": 1.0},
          "decoder": {"kind": "bp_warm"},
          "holdout": 10,
          "cheb_k": 3.0,
          "m_min": 25,
          "m_max": 400,
          "m_step": 25
        })"}},
      {"fig6",
       {"Holdout point estimators head-to-head, N=250 T=25, M in {0, 200}",
        R"({
          "experiment": "estimator_compare",
          "trials": 5000,
          "ensemble": "gaussian",
          "signal": {"kind": "exact_sparse", "dim": 250, "sparsity": 25},
          "holdout": 25,
          "m_values": [0, 200]
        })"}},
      {"fig7",
       {"Noisy-case 90% error bound vs true error, N=1000 K=100 sigma=0.01",
        R"({
          "experiment": "noisy_bound",
          "trials": 1,
          "ensemble": "gaussian",
          "signal": {"kind": "exact_sparse", "dim": 1000, "sparsity": 100},
          "decoder": {"kind": "bpdn", "lambda_c": 0.02, "convergence_tol": 1e-6},
          "noise_sigma": 0.01,
          "holdout": 10,
          "alpha": 0.1,
          "m_min": 100,
          "m_max": 700,
          "m_step": 50
        })"}},
      {"fig8",
       {"Warm vs cold simplex pivot counts along sequential runs, N=200 K=10",
        R"({
          "experiment": "warmstart_bench",
          "trials": 100,
          "ensemble": "gaussian",
          "signal": {"kind": "exact_sparse", "dim": 200, "sparsity": 10},
          "m_min": 2,
          "m_max": 60,
          "m_step": 1
        })"}},
  };
  return table;
}

const std::set<std::string>& known_experiments() {
  static const std::set<std::string> kinds = {
      "stop_hist",     "trace",       "ct_moments",      "error_bounds",
      "estimator_compare", "noisy_bound", "warmstart_bench",
  };
  return kinds;
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field '") + key + "': " + e.what());
  }
}

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed,
                         const std::string& scope) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw ConfigError("unknown config key '" + scope + it.key() + "'");
    }
  }
}

SignalSpec signal_from_json(const json& j) {
  reject_unknown_keys(j, {"kind", "dim", "sparsity", "exponent"}, "signal.");
  const std::string kind = get_or<std::string>(j, "kind", "exact_sparse");
  const int dim = get_or<int>(j, "dim", 100);
  if (kind == "exact_sparse") {
    return SignalSpec::exact_sparse(dim, get_or<int>(j, "sparsity", 10));
  }
  if (kind == "power_law") {
    return SignalSpec::power_law(dim, get_or<double>(j, "exponent", 1.0));
  }
  throw ConfigError("signal.kind must be 'exact_sparse' or 'power_law', got '" + kind + "'");
}

json signal_to_json(const SignalSpec& s) {
  json j;
  j["dim"] = s.dim;
  if (s.kind == SignalSpec::Kind::ExactSparse) {
    j["kind"] = "exact_sparse";
    j["sparsity"] = s.sparsity;
  } else {
    j["kind"] = "power_law";
    j["exponent"] = s.exponent;
  }
  return j;
}

DecoderConfig decoder_from_json(const json& j) {
  reject_unknown_keys(
      j, {"kind", "residual_tol", "convergence_tol", "lambda_c", "max_iterations"}, "decoder.");
  DecoderConfig d;
  const std::string kind = get_or<std::string>(j, "kind", "bp_warm");
  if (kind == "bp_warm") {
    d.kind = DecoderKind::BasisPursuitWarm;
  } else if (kind == "bp_cold") {
    d.kind = DecoderKind::BasisPursuitCold;
  } else if (kind == "omp") {
    d.kind = DecoderKind::Omp;
  } else if (kind == "bpdn") {
    d.kind = DecoderKind::Bpdn;
  } else {
    throw ConfigError("decoder.kind must be one of bp_warm|bp_cold|omp|bpdn, got '" + kind + "'");
  }
  d.residual_tol = get_or<double>(j, "residual_tol", d.residual_tol);
  d.convergence_tol = get_or<double>(j, "convergence_tol", d.convergence_tol);
  d.lambda_c = get_or<double>(j, "lambda_c", d.lambda_c);
  d.max_iterations = get_or<int>(j, "max_iterations", d.max_iterations);
  return d;
}

json decoder_to_json(const DecoderConfig& d) {
  json j;
  j["kind"] = to_string(d.kind);
  j["residual_tol"] = d.residual_tol;
  j["convergence_tol"] = d.convergence_tol;
  j["lambda_c"] = d.lambda_c;
  j["max_iterations"] = d.max_iterations;
  return j;
}

StoppingRule rule_from_json(const json& j) {
  reject_unknown_keys(j,
                      {"kind", "t_steps", "eps_agree", "error_tol", "certifier", "holdout",
                       "cheb_k", "alpha"},
                      "rule.");
  StoppingRule r;
  const std::string kind = get_or<std::string>(j, "kind", "one_step");
  if (kind == "one_step") {
    r.kind = StopRuleKind::OneStepAgreement;
  } else if (kind == "t_step") {
    r.kind = StopRuleKind::TStepAgreement;
  } else if (kind == "cardinality") {
    r.kind = StopRuleKind::Cardinality;
  } else if (kind == "error_below") {
    r.kind = StopRuleKind::ErrorBelow;
  } else {
    throw ConfigError(
        "rule.kind must be one of one_step|t_step|cardinality|error_below, got '" + kind + "'");
  }
  r.t_steps = get_or<int>(j, "t_steps", r.t_steps);
  r.eps_agree = get_or<double>(j, "eps_agree", r.eps_agree);
  r.error_tol = get_or<double>(j, "error_tol", r.error_tol);
  const std::string cert = get_or<std::string>(j, "certifier", "chebyshev");
  if (cert == "chebyshev") {
    r.certifier = CertMethod::ChebyshevCT;
  } else if (cert == "chi_square") {
    r.certifier = CertMethod::Chi2;
  } else {
    throw ConfigError("rule.certifier must be 'chebyshev' or 'chi_square', got '" + cert + "'");
  }
  r.holdout = get_or<int>(j, "holdout", r.holdout);
  r.cheb_k = get_or<double>(j, "cheb_k", r.cheb_k);
  r.alpha = get_or<double>(j, "alpha", r.alpha);
  return r;
}

const char* rule_kind_name(StopRuleKind k) {
  switch (k) {
    case StopRuleKind::OneStepAgreement: return "one_step";
    case StopRuleKind::TStepAgreement: return "t_step";
    case StopRuleKind::Cardinality: return "cardinality";
    case StopRuleKind::ErrorBelow: return "error_below";
  }
  return "one_step";
}

json rule_to_json(const StoppingRule& r) {
  json j;
  j["kind"] = rule_kind_name(r.kind);
  j["t_steps"] = r.t_steps;
  j["eps_agree"] = r.eps_agree;
  j["error_tol"] = r.error_tol;
  j["certifier"] = r.certifier == CertMethod::ChebyshevCT ? "chebyshev" : "chi_square";
  j["holdout"] = r.holdout;
  j["cheb_k"] = r.cheb_k;
  j["alpha"] = r.alpha;
  return j;
}

json parse_override_value(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception&) {
    return json(text);  // unquoted strings fall through as-is
  }
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  static const std::set<std::string> allowed = {
      "experiment", "name",      "trials", "seed",     "out",       "ensemble", "signal",
      "decoder",    "rule",      "noise_sigma",        "budget",    "solve_stride",
      "holdout",    "cheb_k",    "alpha",  "m_min",    "m_max",     "m_step",   "m_values",
      "l_dim",      "t_min",     "t_max",  "samples"};
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");
  reject_unknown_keys(j, allowed, "");

  ExperimentConfig c;
  c.experiment = get_or<std::string>(j, "experiment", "");
  if (!known_experiments().count(c.experiment)) {
    throw ConfigError("unknown experiment '" + c.experiment + "'");
  }
  c.name = get_or<std::string>(j, "name", c.experiment);
  c.trials = get_or<int>(j, "trials", c.trials);
  if (c.trials < 1) throw ConfigError("trials must be at least 1");
  c.seed = get_or<std::uint64_t>(j, "seed", c.seed);
  c.out_dir = get_or<std::string>(j, "out", c.out_dir);
  c.ensemble = get_or<std::string>(j, "ensemble", c.ensemble);
  if (c.ensemble != "gaussian" && c.ensemble != "bernoulli" && c.ensemble != "both") {
    throw ConfigError("ensemble must be gaussian|bernoulli|both, got '" + c.ensemble + "'");
  }
  if (j.contains("signal")) c.signal = signal_from_json(j.at("signal"));
  if (j.contains("decoder")) c.decoder = decoder_from_json(j.at("decoder"));
  if (j.contains("rule")) c.rule = rule_from_json(j.at("rule"));
  c.noise_sigma = get_or<double>(j, "noise_sigma", c.noise_sigma);
  c.budget = get_or<int>(j, "budget", c.budget);
  c.solve_stride = get_or<int>(j, "solve_stride", c.solve_stride);
  c.holdout = get_or<int>(j, "holdout", c.holdout);
  c.cheb_k = get_or<double>(j, "cheb_k", c.cheb_k);
  c.alpha = get_or<double>(j, "alpha", c.alpha);
  c.m_min = get_or<int>(j, "m_min", c.m_min);
  c.m_max = get_or<int>(j, "m_max", c.m_max);
  c.m_step = get_or<int>(j, "m_step", c.m_step);
  c.m_values = get_or<std::vector<int>>(j, "m_values", c.m_values);
  c.l_dim = get_or<int>(j, "l_dim", c.l_dim);
  c.t_min = get_or<int>(j, "t_min", c.t_min);
  c.t_max = get_or<int>(j, "t_max", c.t_max);
  c.samples = get_or<int>(j, "samples", c.samples);
  return c;
}

json ExperimentConfig::to_json() const {
  json j;
  j["experiment"] = experiment;
  j["name"] = name;
  j["trials"] = trials;
  j["seed"] = seed;
  j["out"] = out_dir;
  j["ensemble"] = ensemble;
  j["signal"] = signal_to_json(signal);
  j["decoder"] = decoder_to_json(decoder);
  j["rule"] = rule_to_json(rule);
  j["noise_sigma"] = noise_sigma;
  j["budget"] = budget;
  j["solve_stride"] = solve_stride;
  j["holdout"] = holdout;
  j["cheb_k"] = cheb_k;
  j["alpha"] = alpha;
  j["m_min"] = m_min;
  j["m_max"] = m_max;
  j["m_step"] = m_step;
  j["m_values"] = m_values;
  j["l_dim"] = l_dim;
  j["t_min"] = t_min;
  j["t_max"] = t_max;
  j["samples"] = samples;
  return j;
}

EnsembleKind ExperimentConfig::parse_single_ensemble() const {
  if (ensemble == "gaussian") return EnsembleKind::GaussianStdNormal;
  if (ensemble == "bernoulli") return EnsembleKind::BernoulliPM1;
  throw ConfigError("this experiment needs a single ensemble, got '" + ensemble + "'");
}

ExperimentConfig load_config(const std::string& preset_or_path,
                             const std::vector<std::string>& overrides) {
  json j;
  std::string name;
  const auto& presets = preset_table();
  if (auto it = presets.find(preset_or_path); it != presets.end()) {
    j = json::parse(it->second.second);
    name = it->first;
  } else if (std::filesystem::exists(preset_or_path)) {
    std::ifstream in(preset_or_path);
    if (!in) throw ConfigError("cannot read config file: " + preset_or_path);
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw ConfigError("config file is not valid JSON: " + std::string(e.what()));
    }
    name = std::filesystem::path(preset_or_path).stem().string();
  } else {
    throw ConfigError("'" + preset_or_path + "' is neither a preset nor an existing config file");
  }

  for (const std::string& ov : overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ConfigError("override must look like key=value or a.b=value, got '" + ov + "'");
    }
    const std::string path = ov.substr(0, eq);
    const json value = parse_override_value(ov.substr(eq + 1));
    json* node = &j;
    std::stringstream ss(path);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) {
      if (part.empty()) throw ConfigError("override path has an empty segment: '" + path + "'");
      parts.push_back(part);
    }
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) node = &((*node)[parts[i]]);
    (*node)[parts.back()] = value;
  }

  if (!j.contains("name")) j["name"] = name;
  return ExperimentConfig::from_json(j);
}

std::vector<std::pair<std::string, std::string>> list_presets() {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [name, entry] : preset_table()) out.emplace_back(name, entry.first);
  return out;
}

nlohmann::json preset_json(const std::string& name) {
  const auto& presets = preset_table();
  auto it = presets.find(name);
  if (it == presets.end()) throw ConfigError("unknown preset '" + name + "'");
  return json::parse(it->second.second);
}

}  // namespace seqcs::harness
