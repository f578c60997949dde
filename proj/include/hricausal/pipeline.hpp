#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "hricausal/collector.hpp"
#include "hricausal/config.hpp"
#include "hricausal/discovery/pool_watcher.hpp"

namespace hricausal {

struct RunOptions {
  bool quiet_abort = false;  ///< skip draining the pool at shutdown
};

struct RunResult {
  std::vector<CausalModel> models;  ///< in publication order
  std::vector<EmittedBatch> emitted;
  std::vector<discovery::ProcessedFile> processed;
  std::vector<std::string> quarantined;
  std::vector<std::filesystem::path> model_files;  ///< json and dot, per model
  std::filesystem::path manifest;
  std::size_t skipped_samples = 0;
  std::size_t failed_batches = 0;
  bool drained = true;
  double sim_end_time = 0.0;
};

/// Simulates, collects and analyses under one simulated clock until
/// `config.duration`, then drains the pool (unless told not to). Writes
/// model_<batch>.json / .dot per analysed batch and manifest.json into
/// config.output_dir.
RunResult run_pipeline(const ScenarioConfig& config, const RunOptions& options = {});

/// Offline analysis of one CSV file; writes <stem>.json and <stem>.dot into
/// `output_dir` and leaves the input in place.
CausalModel discover_csv(const std::filesystem::path& csv, DiscoveryMethod method,
                         const DiscoveryParams& params, const stats::TEParams& te,
                         const std::filesystem::path& output_dir);

/// Names of the per-batch model files.
std::string model_file_stem(const std::string& batch_id);

struct BenchRow {
  std::string spec;
  std::string method;
  std::size_t seeds = 0;
  std::size_t failed = 0;
  double precision_mean = 0.0, precision_std = 0.0;
  double recall_mean = 0.0, recall_std = 0.0;
  double f1_mean = 0.0, f1_std = 0.0;
  double wall_mean = 0.0, wall_std = 0.0;
  std::string error;  ///< first failure message, if any
};

struct BenchReport {
  std::vector<BenchRow> rows;

  std::string table() const;
  void write_csv(const std::filesystem::path& path) const;
};

/// Discovery settings for a named bench method on a spec.
DiscoveryParams bench_params(const std::string& method, const DiscoveryParams& base,
                             const bench::SCMSpec& spec);
DiscoveryMethod bench_method(const std::string& method);

/// Every spec against every method over config.seeds seeds. Unstable specs
/// produce a failed row; the run continues.
BenchReport run_bench(const BenchConfig& config);

}  // namespace hricausal
