// Command-line front end: run | discover | bench.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "hricausal/config.hpp"
#include "hricausal/error.hpp"
#include "hricausal/pipeline.hpp"

namespace {

using namespace hricausal;

enum Exit { kOk = 0, kValidation = 1, kRuntime = 2 };

struct Overrides {
  std::string config;
  std::optional<double> alpha;
  std::optional<int> tau_min;
  std::optional<int> tau_max;
  std::optional<std::string> citest;
  std::optional<std::string> method;
  std::optional<double> dt;
  std::optional<double> batch_seconds;
  std::optional<double> duration;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  bool quiet = false;
  bool quiet_abort = false;
  std::optional<std::size_t> seeds;
  std::string csv;
};

void add_discovery_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "JSON config file");
  cmd->add_option("--alpha", o.alpha, "significance level");
  cmd->add_option("--tau-min", o.tau_min, "smallest lag");
  cmd->add_option("--tau-max", o.tau_max, "largest lag");
  cmd->add_option("--citest", o.citest, "conditional independence test")
      ->check(CLI::IsMember({"parcorr", "kridge-dcor"}));
  cmd->add_option("--seed", o.seed, "random seed");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_flag("--quiet", o.quiet, "only log warnings and errors");
}

void apply_discovery(const Overrides& o, DiscoveryParams& p) {
  if (o.alpha) p.alpha = *o.alpha;
  if (o.tau_min) p.tau_min = *o.tau_min;
  if (o.tau_max) p.tau_max = *o.tau_max;
  if (o.citest) p.ci_test = stats::parse_ci_test(*o.citest);
}

nlohmann::json config_doc(const Overrides& o) {
  return o.config.empty() ? nlohmann::json::object() : load_json(o.config);
}

int cmd_run(const Overrides& o) {
  ScenarioConfig cfg = scenario_from_json(config_doc(o));
  apply_discovery(o, cfg.discovery);
  if (o.method) cfg.method = parse_method(*o.method);
  if (o.dt) cfg.collector.dt = *o.dt;
  if (o.batch_seconds) cfg.collector.batch_seconds = *o.batch_seconds;
  if (o.duration) cfg.duration = *o.duration;
  if (o.seed) cfg.seed = *o.seed;
  if (o.out) cfg.output_dir = *o.out;
  cfg.collector.pool_dir = cfg.pool_dir();

  RunOptions options;
  options.quiet_abort = o.quiet_abort;
  const RunResult r = run_pipeline(cfg, options);
  if (!o.quiet) {
    std::printf("%zu batch(es) collected, %zu model(s) written to %s\n", r.emitted.size(), r.models.size(),
                cfg.output_dir.string().c_str());
    if (!r.quarantined.empty()) std::printf("%zu file(s) quarantined\n", r.quarantined.size());
    if (!r.drained) std::printf("pool not drained; unprocessed files remain in %s\n", cfg.pool_dir().string().c_str());
  }
  return r.quarantined.empty() ? kOk : kRuntime;
}

int cmd_discover(const Overrides& o) {
  const auto doc = config_doc(o);
  ScenarioConfig cfg = scenario_from_json(doc);
  apply_discovery(o, cfg.discovery);
  if (o.method) cfg.method = parse_method(*o.method);
  if (o.seed) cfg.seed = *o.seed;
  cfg.discovery.seed = cfg.seed;
  const std::filesystem::path out = o.out ? std::filesystem::path(*o.out) : std::filesystem::path(".");
  const CausalModel m = discover_csv(o.csv, cfg.method, cfg.discovery, cfg.te, out);
  if (!o.quiet) {
    for (const auto& e : edges_of(m)) {
      std::printf("%s -> %s (lag %d)\n", m.variable_names[e.source].c_str(), m.variable_names[e.target].c_str(),
                  e.lag);
    }
  }
  return kOk;
}

int cmd_bench(const Overrides& o) {
  BenchConfig cfg = bench_from_json(config_doc(o));
  apply_discovery(o, cfg.discovery);
  if (o.seed) cfg.base_seed = *o.seed;
  if (o.seeds) cfg.seeds = *o.seeds;
  if (o.out) cfg.output_dir = *o.out;
  const BenchReport report = run_bench(cfg);
  std::filesystem::create_directories(cfg.output_dir);
  const auto path = cfg.output_dir / "bench_report.csv";
  report.write_csv(path);
  std::cout << report.table();
  if (!o.quiet) std::printf("report written to %s\n", path.string().c_str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulate, collect and discover causal models of human-robot interaction"};
  app.require_subcommand(1);

  Overrides o;
  auto* run = app.add_subcommand("run", "simulate, collect and analyse batches");
  add_discovery_flags(run, o);
  run->add_option("--method", o.method, "discovery method")->check(CLI::IsMember({"pcmci", "fpcmci"}));
  run->add_option("--dt", o.dt, "sampling step [s]");
  run->add_option("--batch-seconds", o.batch_seconds, "batch length [s]");
  run->add_option("--duration", o.duration, "simulated duration [s]");
  run->add_flag("--quiet-abort", o.quiet_abort, "stop without draining the pool");

  auto* discover = app.add_subcommand("discover", "analyse one CSV file");
  discover->add_option("csv", o.csv, "input CSV")->required();
  add_discovery_flags(discover, o);
  discover->add_option("--method", o.method, "discovery method")->check(CLI::IsMember({"pcmci", "fpcmci"}));

  auto* bench = app.add_subcommand("bench", "benchmark methods on synthetic SCMs");
  add_discovery_flags(bench, o);
  bench->add_option("--seeds", o.seeds, "seeds per spec and method");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  spdlog::set_level(o.quiet ? spdlog::level::warn : spdlog::level::info);
  try {
    if (*run) return cmd_run(o);
    if (*discover) return cmd_discover(o);
    return cmd_bench(o);
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kValidation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kRuntime;
  }
}
