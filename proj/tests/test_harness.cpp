#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "harness/config.hpp"
#include "harness/csv.hpp"
#include "harness/experiments.hpp"
#include "seqcs/errors.hpp"

using namespace seqcs;
using namespace seqcs::harness;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "seqcs_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string first_line(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::string line;
  std::getline(in, line);
  return line;
}

ExperimentConfig tiny_stop_hist(const fs::path& out) {
  ExperimentConfig cfg;
  cfg.experiment = "stop_hist";
  cfg.name = "tiny_stop_hist";
  cfg.trials = 8;
  cfg.seed = 77;
  cfg.out_dir = out.string();
  cfg.ensemble = "gaussian";
  cfg.signal = SignalSpec::exact_sparse(30, 3);
  cfg.rule = StoppingRule::one_step();
  cfg.budget = 40;
  return cfg;
}

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("csv cells are quoted per the delimiter rules, byte for byte") {
    const fs::path dir = fresh_dir("csv_bytes");
    const fs::path file = dir / "t.csv";
    {
      CsvWriter csv(file);
      csv.header({"plain", "with,comma", "with\"quote"});
      csv.row({"a b", "line\nbreak", ""});
    }
    CHECK(slurp(file) ==
          "plain,\"with,comma\",\"with\"\"quote\"\n"
          "a b,\"line\nbreak\",\n");
  }

  TEST_CASE("numeric formatting is stable and locale-free") {
    CHECK(CsvWriter::num(1.0) == "1");
    CHECK(CsvWriter::num(0.5) == "0.5");
    CHECK(CsvWriter::num(-2.25) == "-2.25");
    CHECK(CsvWriter::num(1.0 / 3.0) == "0.33333333333333331");
    CHECK(CsvWriter::num(42) == "42");
    CHECK(CsvWriter::num(static_cast<std::int64_t>(-7)) == "-7");
    CHECK(CsvWriter::boolean(true) == "true");
    CHECK(CsvWriter::boolean(false) == "false");
  }

  TEST_CASE("every built-in preset parses") {
    const auto presets = list_presets();
    CHECK(presets.size() == 8);
    for (const auto& [name, description] : presets) {
      CHECK_FALSE(description.empty());
      const ExperimentConfig cfg = load_config(name, {});
      CHECK(cfg.name == name);
      CHECK_FALSE(cfg.experiment.empty());
    }
  }

  TEST_CASE("unknown presets and malformed overrides are rejected") {
    CHECK_THROWS_AS(load_config("no_such_preset", {}), ConfigError);
    CHECK_THROWS_AS(load_config("fig3", {"bogus_key=1"}), ConfigError);
    CHECK_THROWS_AS(load_config("fig3", {"novalue"}), ConfigError);
    CHECK_THROWS_AS(load_config("fig3", {"=5"}), ConfigError);
    CHECK_THROWS_AS(preset_json("no_such_preset"), ConfigError);
  }

  TEST_CASE("overrides reach top-level and nested fields") {
    const ExperimentConfig cfg =
        load_config("fig3", {"trials=7", "decoder.kind=omp", "signal.dim=64", "seed=5"});
    CHECK(cfg.trials == 7);
    CHECK(cfg.decoder.kind == DecoderKind::Omp);
    CHECK(cfg.signal.dim == 64);
    CHECK(cfg.seed == 5);
  }

  TEST_CASE("single-ensemble experiments refuse the combined setting") {
    ExperimentConfig cfg = load_config("fig3", {});
    cfg.ensemble = "both";
    CHECK_THROWS_AS(cfg.parse_single_ensemble(), ConfigError);
    cfg.ensemble = "bernoulli";
    CHECK(cfg.parse_single_ensemble() == EnsembleKind::BernoulliPM1);
  }

  TEST_CASE("configs survive a json round trip") {
    const ExperimentConfig a = load_config("fig7", {});
    const ExperimentConfig b = ExperimentConfig::from_json(a.to_json());
    CHECK(a.experiment == b.experiment);
    CHECK(a.name == b.name);
    CHECK(a.trials == b.trials);
    CHECK(a.seed == b.seed);
    CHECK(a.ensemble == b.ensemble);
    CHECK(a.signal.dim == b.signal.dim);
    CHECK(a.signal.sparsity == b.signal.sparsity);
    CHECK(a.decoder.kind == b.decoder.kind);
    CHECK(a.decoder.lambda_c == b.decoder.lambda_c);
    CHECK(a.rule.kind == b.rule.kind);
    CHECK(a.noise_sigma == b.noise_sigma);
    CHECK(a.holdout == b.holdout);
    CHECK(a.alpha == b.alpha);
    CHECK(a.m_min == b.m_min);
    CHECK(a.m_max == b.m_max);
    CHECK(a.m_step == b.m_step);
  }

  TEST_CASE("a trace run writes its manifest and the documented header") {
    const fs::path dir = fresh_dir("trace_run");
    ExperimentConfig cfg;
    cfg.experiment = "trace";
    cfg.name = "tiny_trace";
    cfg.trials = 1;
    cfg.seed = 99;
    cfg.out_dir = dir.string();
    cfg.signal = SignalSpec::exact_sparse(25, 3);
    cfg.rule = StoppingRule::one_step();
    CHECK(run_experiment(cfg) == 0);

    const nlohmann::json man = nlohmann::json::parse(slurp(dir / "manifest.json"));
    CHECK(man.at("status") == "complete");
    CHECK(man.at("name") == "tiny_trace");
    CHECK(man.at("experiment") == "trace");
    bool has_trace = false;
    for (const auto& out : man.at("outputs")) {
      if (out == "trace.csv") has_trace = true;
    }
    CHECK(has_trace);
    CHECK(first_line(dir / "trace.csv") == "M,l0,l1,err2,agreed,stopped,reason");
  }

  TEST_CASE("reruns of the same config are byte-identical") {
    const fs::path a = fresh_dir("rerun_a");
    const fs::path b = fresh_dir("rerun_b");
    ExperimentConfig ca = tiny_stop_hist(a);
    ExperimentConfig cb = tiny_stop_hist(b);
    REQUIRE(run_experiment(ca) == 0);
    REQUIRE(run_experiment(cb) == 0);
    CHECK(slurp(a / "stop_hist.csv") == slurp(b / "stop_hist.csv"));
    const nlohmann::json ma = nlohmann::json::parse(slurp(a / "manifest.json"));
    const nlohmann::json mb = nlohmann::json::parse(slurp(b / "manifest.json"));
    CHECK(ma.at("trial_seeds") == mb.at("trial_seeds"));
    CHECK(first_line(a / "stop_hist.csv") == "ensemble,trial,M_stop");
  }

  TEST_CASE("results do not depend on the worker count") {
    const fs::path one = fresh_dir("workers_1");
    const fs::path four = fresh_dir("workers_4");
    ::setenv("SEQCS_WORKERS", "1", 1);
    REQUIRE(run_experiment(tiny_stop_hist(one)) == 0);
    ::setenv("SEQCS_WORKERS", "4", 1);
    REQUIRE(run_experiment(tiny_stop_hist(four)) == 0);
    ::unsetenv("SEQCS_WORKERS");
    CHECK(slurp(one / "stop_hist.csv") == slurp(four / "stop_hist.csv"));
  }

  TEST_CASE("a failing run reports status failed and a nonzero code") {
    const fs::path dir = fresh_dir("fail_run");
    ExperimentConfig cfg;
    cfg.experiment = "noisy_bound";
    cfg.name = "starved_solver";
    cfg.trials = 2;
    cfg.seed = 11;
    cfg.out_dir = dir.string();
    cfg.signal = SignalSpec::exact_sparse(40, 4);
    cfg.decoder.kind = DecoderKind::Bpdn;
    cfg.decoder.lambda_c = 0.02;
    cfg.decoder.max_iterations = 3;  // guaranteed to hit the iteration cap
    cfg.noise_sigma = 0.01;
    cfg.holdout = 4;
    cfg.alpha = 0.1;
    cfg.m_min = 10;
    cfg.m_max = 12;
    cfg.m_step = 2;
    CHECK(run_experiment(cfg) == 3);
    const nlohmann::json man = nlohmann::json::parse(slurp(dir / "manifest.json"));
    CHECK(man.at("status") == "failed");
    CHECK(man.at("extras").at("failures").size() > 0);
  }

  TEST_CASE("worker count floors at one") {
    ::setenv("SEQCS_WORKERS", "0", 1);
    CHECK(worker_count() >= 1);
    ::setenv("SEQCS_WORKERS", "3", 1);
    CHECK(worker_count() == 3);
    ::unsetenv("SEQCS_WORKERS");
    CHECK(worker_count() >= 1);
  }
}
