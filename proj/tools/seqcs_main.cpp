#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "acceptance/criteria.hpp"
#include "harness/config.hpp"
#include "harness/experiments.hpp"
#include "seqcs/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"sequential compressed sensing toolkit"};
  app.require_subcommand(1);

  std::string target;
  std::vector<std::string> overrides;
  std::optional<int> trials;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;

  CLI::App* run = app.add_subcommand("run", "run an experiment preset or JSON config file");
  run->add_option("config", target, "preset name or path to a config file")->required();
  run->add_option("--trials", trials, "number of trials");
  run->add_option("--seed", seed, "master seed");
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--override", overrides,
                  "key=value config override (repeatable; dotted paths reach nested fields)");

  CLI::App* list = app.add_subcommand("list-presets", "list the built-in experiment presets");
  CLI::App* verify =
      app.add_subcommand("verify", "run the release-gate property checks and report PASS/FAIL");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (list->parsed()) {
      for (const auto& [name, description] : seqcs::harness::list_presets()) {
        std::cout << name << "  " << description << "\n";
      }
      return 0;
    }
    if (verify->parsed()) {
      return seqcs::acceptance::run_all(std::cout) == 0 ? 0 : 1;
    }
    // Dedicated flags are appended after user overrides so they take priority.
    if (trials) overrides.push_back("trials=" + std::to_string(*trials));
    if (seed) overrides.push_back("seed=" + std::to_string(*seed));
    if (out_dir) overrides.push_back("out=" + *out_dir);
    const seqcs::harness::ExperimentConfig cfg = seqcs::harness::load_config(target, overrides);
    return seqcs::harness::run_experiment(cfg);
  } catch (const seqcs::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
