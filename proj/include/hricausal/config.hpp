#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hricausal/bench/scm.hpp"
#include "hricausal/causal_model.hpp"
#include "hricausal/collector.hpp"
#include "hricausal/postprocess.hpp"
#include "hricausal/sim/social_force.hpp"
#include "hricausal/stats/types.hpp"

namespace hricausal {

/// Everything a pipeline run needs, in one document.
struct ScenarioConfig {
  CollectorConfig collector;  ///< pool_dir is always <output_dir>/csv_pool
  DiscoveryMethod method = DiscoveryMethod::FPCMCI;
  DiscoveryParams discovery;
  double poll_interval = 1.0;
  double analysis_delay = 0.0;
  stats::TEParams te;
  RiskParams risk;
  sim::SFMParams sfm;
  sim::Bounds bounds;
  sim::RobotPath robot_path = sim::RobotPath::rectangle(sim::Bounds{}, 2.0);
  double human_radius = 0.3;
  double robot_radius = 0.3;
  double dt_sim = 0.05;
  double duration = 150.0;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "out";

  ScenarioConfig();

  sim::ScenarioSetup scenario_setup() const;
  std::filesystem::path pool_dir() const { return output_dir / "csv_pool"; }

  /// Every violated constraint, one message each; empty when valid.
  std::vector<std::string> validation_errors() const;
  /// Throws ValidationError carrying the whole report.
  void validate() const;
};

/// Benchmark section: which SCMs to run, with which methods, over how many seeds.
struct BenchConfig {
  std::vector<bench::SCMSpec> specs;
  std::vector<std::string> methods{"pcmci-parcorr", "pcmci-kridge", "fpcmci"};
  std::size_t seeds = 20;
  std::uint64_t base_seed = 0;
  DiscoveryParams discovery;
  stats::TEParams te;
  std::filesystem::path output_dir = "bench_out";

  BenchConfig();

  std::vector<std::string> validation_errors() const;
  void validate() const;
};

std::vector<std::string> bench_method_names();

/// Parses the "run" keys of a config document on top of `base`. Unknown keys
/// and type errors are collected; the call throws one ValidationError listing
/// all of them.
ScenarioConfig scenario_from_json(const nlohmann::json& doc, ScenarioConfig base = {});
BenchConfig bench_from_json(const nlohmann::json& doc, BenchConfig base = {});

nlohmann::json scenario_to_json(const ScenarioConfig& config);
nlohmann::json bench_to_json(const BenchConfig& config);
nlohmann::json spec_to_json(const bench::SCMSpec& spec);

/// Reads a JSON file. ParseError on malformed JSON, Error when unreadable.
nlohmann::json load_json(const std::filesystem::path& path);

}  // namespace hricausal
