#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "seqcs/ensembles.hpp"
#include "seqcs/sequential.hpp"

namespace seqcs::harness {

const char* toolkit_version();

/// Declarative description of one experiment run. Superset of the knobs the
/// individual experiments consume; unused fields are ignored by each runner.
struct ExperimentConfig {
  std::string experiment;  // stop_hist | trace | ct_moments | error_bounds |
                           // estimator_compare | noisy_bound | warmstart_bench
  std::string name;        // preset name or config-file stem, used in outputs
  int trials = 1;
  std::uint64_t seed = 20260819;
  std::string out_dir = "results";

  std::string ensemble = "gaussian";  // gaussian | bernoulli | both
  SignalSpec signal = SignalSpec::exact_sparse(100, 10);
  DecoderConfig decoder;
  StoppingRule rule;
  double noise_sigma = 0.0;
  int budget = 0;
  int solve_stride = 1;

  // Certificate / estimator settings.
  int holdout = 5;
  double cheb_k = 3.0;
  double alpha = 0.1;

  // Sweep controls.
  int m_min = 0;
  int m_max = 0;
  int m_step = 1;
  std::vector<int> m_values;  // estimator_compare fit-row counts

  // ct_moments controls.
  int l_dim = 100;
  int t_min = 3;
  int t_max = 50;
  int samples = 5000;

  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& j);

  EnsembleKind parse_single_ensemble() const;  // rejects "both"
};

/// Resolve a preset name or a JSON config file path, apply key=value
/// overrides (dotted paths, values parsed as JSON literals with string
/// fallback), and return the decoded config. Throws ConfigError on any
/// unknown preset, unreadable file, malformed JSON, or invalid field.
ExperimentConfig load_config(const std::string& preset_or_path,
                             const std::vector<std::string>& overrides);

/// (name, one-line description) for every built-in preset.
std::vector<std::pair<std::string, std::string>> list_presets();

/// The raw JSON text of one preset; throws ConfigError if unknown.
nlohmann::json preset_json(const std::string& name);

}  // namespace seqcs::harness
