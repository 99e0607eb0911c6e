#include "harness/manifest.hpp"

#include <fstream>

#include "seqcs/errors.hpp"

namespace seqcs::harness {

void RunManifest::write(const std::filesystem::path& out_dir) const {
  nlohmann::json j;
  j["name"] = name;
  j["experiment"] = experiment;
  j["version"] = version;
  j["config"] = config;
  j["master_seed"] = master_seed;
  j["trial_seeds"] = trial_seeds;
  j["outputs"] = outputs;
  j["extras"] = extras;
  j["workers"] = workers;
  j["status"] = status;
  j["wall_ms"] = wall_ms;

  const auto path = out_dir / "manifest.json";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write manifest: " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace seqcs::harness
