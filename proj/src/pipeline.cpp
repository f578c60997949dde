#include "hricausal/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>

#include <boost/crc.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "hricausal/bus.hpp"
#include "hricausal/clock.hpp"
#include "hricausal/discovery/export.hpp"
#include "hricausal/discovery/pcmci.hpp"
#include "hricausal/error.hpp"
#include "hricausal/sim/social_force.hpp"

namespace hricausal {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string crc32_hex(const std::string& bytes) {
  boost::crc_32_type crc;
  crc.process_bytes(bytes.data(), bytes.size());
  char buf[16];
  std::snprintf(buf, sizeof buf, "%08x", static_cast<unsigned>(crc.checksum()));
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed: " + path.string());
}

json edge_list(const CausalModel& m) {
  json edges = json::array();
  for (const auto& e : edges_of(m)) {
    const std::size_t l = static_cast<std::size_t>(e.lag - m.tau_min);
    edges.push_back({{"source", m.variable_names[e.source]},
                     {"target", m.variable_names[e.target]},
                     {"lag", e.lag},
                     {"val", m.val_matrix(l, e.source, e.target)},
                     {"pval", m.pval_matrix(l, e.source, e.target)}});
  }
  return edges;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

std::string model_file_stem(const std::string& batch_id) { return "model_" + batch_id; }

RunResult run_pipeline(const ScenarioConfig& input, const RunOptions& options) {
  ScenarioConfig cfg = input;
  cfg.collector.pool_dir = cfg.pool_dir();
  cfg.discovery.seed = cfg.seed;
  cfg.validate();

  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (!fs::is_directory(cfg.output_dir)) {
    throw ValidationError("cannot create output directory " + cfg.output_dir.string());
  }
  cfg.collector.validate();
  const fs::path pool = cfg.collector.pool_dir;
  if (const auto stale = discovery::pending_files(pool); !stale.empty()) {
    throw ValidationError("pool " + pool.string() + " still holds " + std::to_string(stale.size()) +
                          " unprocessed file(s) from an earlier run; remove them first");
  }

  const auto wall_start = std::chrono::steady_clock::now();
  Bus bus;
  register_pipeline_topics(bus);
  Subscription model_sub = bus.subscribe(kCausalModelTopic, 1024);
  SimClock clock;
  sim::Scenario scenario(cfg.scenario_setup(), &bus);
  Collector collector(bus, cfg.collector, cfg.risk, 0.0);

  discovery::WatcherConfig wc;
  wc.pool_dir = pool;
  wc.poll_interval = cfg.poll_interval;
  wc.analysis_delay = cfg.analysis_delay;
  wc.method = cfg.method;
  wc.params = cfg.discovery;
  wc.te = cfg.te;
  discovery::PoolWatcher watcher(bus, clock, wc);

  RunResult result;
  std::map<std::string, json> artifacts;
  auto handle_models = [&] {
    for (const auto& env : model_sub.drain()) {
      const CausalModel& m = env.payload.causal_model();
      const std::string stem = model_file_stem(m.batch_id);
      const std::string json_text = discovery::render_model(m, discovery::ExportFormat::Json);
      const std::string dot_text = discovery::render_model(m, discovery::ExportFormat::Dot);
      const fs::path json_path = cfg.output_dir / (stem + ".json");
      const fs::path dot_path = cfg.output_dir / (stem + ".dot");
      write_text(json_path, json_text);
      write_text(dot_path, dot_text);
      result.model_files.push_back(json_path);
      result.model_files.push_back(dot_path);
      artifacts[m.batch_id] = {{"json", {{"file", json_path.filename().string()}, {"crc32", crc32_hex(json_text)}}},
                               {"dot", {{"file", dot_path.filename().string()}, {"crc32", crc32_hex(dot_text)}}},
                               {"published_at", env.publish_time},
                               {"edges", edge_list(m)}};
      spdlog::info("model {}: {} edge(s) -> {}", m.batch_id, edges_of(m).size(), json_path.string());
      result.models.push_back(m);
    }
  };

  watcher.start();
  scenario.publish_initial();
  collector.tick(0.0);

  const auto steps = static_cast<long long>(std::llround(cfg.duration / cfg.dt_sim));
  for (long long i = 0; i < steps; ++i) {
    const double t = scenario.advance().time;
    clock.advance_to(t);
    const std::size_t before = collector.emitted().size();
    collector.tick(t);
    if (collector.emitted().size() != before) {
      spdlog::info("batch {} written at t = {:.1f} s", collector.emitted().back().index, t);
    }
    handle_models();
  }

  if (!options.quiet_abort) {
    // keep time flowing so the watcher can finish (and honour analysis_delay)
    while (!discovery::pending_files(pool).empty() || watcher.busy()) {
      clock.advance_by(cfg.collector.dt);
      std::this_thread::sleep_for(std::chrono::milliseconds(1));
      handle_models();
    }
  }
  watcher.stop();
  handle_models();

  result.emitted = collector.emitted();
  result.processed = watcher.processed();
  result.quarantined = watcher.quarantined();
  result.skipped_samples = collector.skipped_samples();
  result.failed_batches = collector.failed_batches();
  result.drained = discovery::pending_files(pool).empty();
  result.sim_end_time = clock.now();

  json batches = json::array();
  for (const auto& e : result.emitted) {
    const std::string name = e.path.filename().string();
    const std::string id = discovery::batch_id_for(e.path);
    json b = {{"batch_id", id}, {"csv", name}, {"t0", e.t0}, {"emitted_at", e.emit_time}};
    for (const auto& p : result.processed) {
      if (p.filename == name) {
        b["analysis_started_at"] = p.started_at;
        b["analysis_wall_seconds"] = p.wall_seconds;
      }
    }
    if (auto it = artifacts.find(id); it != artifacts.end()) {
      b.update(it->second);
      b["status"] = "analysed";
    } else if (std::find(result.quarantined.begin(), result.quarantined.end(), name) != result.quarantined.end()) {
      b["status"] = "quarantined";
    } else {
      b["status"] = "pending";
    }
    batches.push_back(b);
  }
  json manifest = {{"config", scenario_to_json(cfg)},
                   {"seed", cfg.seed},
                   {"drained", result.drained},
                   {"sim_end_time", result.sim_end_time},
                   {"wall_seconds", seconds_since(wall_start)},
                   {"skipped_samples", result.skipped_samples},
                   {"failed_batches", result.failed_batches},
                   {"batches", batches}};
  result.manifest = cfg.output_dir / "manifest.json";
  write_text(result.manifest, manifest.dump(2) + "\n");
  return result;
}

CausalModel discover_csv(const fs::path& csv, DiscoveryMethod method, const DiscoveryParams& params,
                         const stats::TEParams& te, const fs::path& output_dir) {
  params.validate();
  te.validate();
  if (!fs::is_regular_file(csv)) throw Error("file not found: " + csv.string());
  const TimeSeriesBatch batch = read_csv(csv);
  CausalModel model = discovery::run_discovery(method, batch, params, te, csv.stem().string());
  std::error_code ec;
  fs::create_directories(output_dir, ec);
  const std::string stem = csv.stem().string();
  discovery::export_model(model, discovery::ExportFormat::Json, output_dir / (stem + ".json"));
  discovery::export_model(model, discovery::ExportFormat::Dot, output_dir / (stem + ".dot"));
  return model;
}

DiscoveryMethod bench_method(const std::string& method) {
  if (method == "pcmci-parcorr" || method == "pcmci-kridge") return DiscoveryMethod::PCMCI;
  if (method == "fpcmci") return DiscoveryMethod::FPCMCI;
  throw ValidationError("unknown bench method '" + method + "'");
}

DiscoveryParams bench_params(const std::string& method, const DiscoveryParams& base,
                             const bench::SCMSpec& spec) {
  DiscoveryParams p = base;
  if (method == "pcmci-parcorr") p.ci_test = stats::CITestKind::ParCorr;
  else if (method == "pcmci-kridge") p.ci_test = stats::CITestKind::KRidgeDcor;
  else (void)bench_method(method);
  p.tau_max = std::max(p.tau_max, spec.max_lag());
  p.seed = spec.seed;
  return p;
}

namespace {

std::pair<double, double> mean_std(const std::vector<double>& v) {
  if (v.empty()) return {0.0, 0.0};
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
  if (v.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / double(v.size() - 1))};
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

BenchReport run_bench(const BenchConfig& config) {
  config.validate();
  BenchReport report;
  for (const auto& spec : config.specs) {
    for (const auto& method : config.methods) {
      BenchRow row;
      row.spec = spec.name;
      row.method = method;
      std::vector<double> precision, recall, f1, wall;
      for (std::size_t s = 0; s < config.seeds; ++s) {
        bench::SCMSpec seeded = spec;
        seeded.seed = config.base_seed + s;
        ++row.seeds;
        try {
          const auto sample = bench::generate(seeded);
          const auto params = bench_params(method, config.discovery, seeded);
          const auto start = std::chrono::steady_clock::now();
          const CausalModel m =
              discovery::run_discovery(bench_method(method), sample.batch, params, config.te, spec.name);
          wall.push_back(seconds_since(start));
          const auto score = bench::score(m, sample.truth);
          precision.push_back(score.precision);
          recall.push_back(score.recall);
          f1.push_back(score.f1);
        } catch (const Error& e) {
          ++row.failed;
          if (row.error.empty()) row.error = e.what();
          spdlog::warn("bench {} / {} seed {}: {}", spec.name, method, seeded.seed, e.what());
        }
      }
      std::tie(row.precision_mean, row.precision_std) = mean_std(precision);
      std::tie(row.recall_mean, row.recall_std) = mean_std(recall);
      std::tie(row.f1_mean, row.f1_std) = mean_std(f1);
      std::tie(row.wall_mean, row.wall_std) = mean_std(wall);
      spdlog::info("bench {} / {}: f1 {:.3f} +- {:.3f}", row.spec, row.method, row.f1_mean, row.f1_std);
      report.rows.push_back(row);
    }
  }
  return report;
}

std::string BenchReport::table() const {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-16s %-14s %5s %6s %15s %15s %15s %15s\n", "spec", "method", "seeds",
                "failed", "precision", "recall", "f1", "wall [s]");
  out << line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%-16s %-14s %5zu %6zu %7.3f+-%6.3f %7.3f+-%6.3f %7.3f+-%6.3f %7.3f+-%6.3f\n",
                  r.spec.c_str(), r.method.c_str(), r.seeds, r.failed, r.precision_mean, r.precision_std,
                  r.recall_mean, r.recall_std, r.f1_mean, r.f1_std, r.wall_mean, r.wall_std);
    out << line;
  }
  return out.str();
}

void BenchReport::write_csv(const fs::path& path) const {
  std::ostringstream out;
  out << "spec,method,seeds,failed,precision_mean,precision_std,recall_mean,recall_std,f1_mean,f1_std,"
         "wall_mean_s,wall_std_s,error\n";
  for (const auto& r : rows) {
    out << csv_quote(r.spec) << ',' << csv_quote(r.method) << ',' << r.seeds << ',' << r.failed << ','
        << r.precision_mean << ',' << r.precision_std << ',' << r.recall_mean << ',' << r.recall_std << ','
        << r.f1_mean << ',' << r.f1_std << ',' << r.wall_mean << ',' << r.wall_std << ',' << csv_quote(r.error)
        << '\n';
  }
  write_text(path, out.str());
}

}  // namespace hricausal
