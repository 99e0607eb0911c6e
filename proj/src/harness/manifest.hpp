#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace seqcs::harness {

/// Run record written to <out>/manifest.json: once with status "running"
/// before any trial starts, and again finalized when the run ends. Carries
/// everything needed to rerun any single trial in isolation.
struct RunManifest {
  std::string name;
  std::string experiment;
  std::string version;
  nlohmann::json config;
  std::uint64_t master_seed = 0;
  std::vector<std::uint64_t> trial_seeds;
  std::vector<std::string> outputs;
  nlohmann::json extras;  // experiment-specific summary values and notes
  int workers = 1;
  std::string status = "running";  // running | complete | failed
  double wall_ms = 0.0;

  void write(const std::filesystem::path& out_dir) const;
};

}  // namespace seqcs::harness
