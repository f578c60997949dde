#include "hricausal/discovery/pool_watcher.hpp"

#include <algorithm>
#include <chrono>
#include <regex>

#include <spdlog/spdlog.h>

#include "hricausal/discovery/pcmci.hpp"
#include "hricausal/error.hpp"
#include "hricausal/timeseries.hpp"

namespace hricausal::discovery {

namespace fs = std::filesystem;

std::vector<fs::path> pending_files(const fs::path& pool_dir) {
  std::vector<fs::path> files;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(pool_dir, ec)) {
    if (!entry.is_regular_file()) continue;
    const auto name = entry.path().filename().string();
    if (name.starts_with(".") || entry.path().extension() != ".csv") continue;
    files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
  return files;
}

std::string batch_id_for(const fs::path& file) {
  static const std::regex pattern(R"(data_(\d+)_\d+)");
  const auto stem = file.stem().string();
  std::smatch m;
  if (std::regex_match(stem, m, pattern)) return std::to_string(std::stoull(m[1].str()));
  return stem;
}

PoolWatcher::PoolWatcher(Bus& bus, SimClock& clock, WatcherConfig config)
    : bus_(bus), clock_(clock), config_(std::move(config)) {
  config_.params.validate();
  config_.te.validate();
  if (!(config_.poll_interval > 0.0)) throw ValidationError("poll interval must be positive");
  if (config_.analysis_delay < 0.0) throw ValidationError("analysis delay must be non-negative");
  if (!fs::is_directory(config_.pool_dir)) {
    throw ValidationError("pool directory does not exist: " + config_.pool_dir.string());
  }
  register_pipeline_topics(bus_);
}

PoolWatcher::~PoolWatcher() { stop(); }

bool PoolWatcher::poll_once(std::stop_token stop) {
  busy_ = true;
  struct Idle {
    std::atomic<bool>& flag;
    ~Idle() { flag = false; }
  } idle{busy_};

  const auto files = pending_files(config_.pool_dir);
  if (files.empty()) return false;
  const fs::path file = files.front();
  const std::string name = file.filename().string();
  const std::string batch_id = batch_id_for(file);
  const double started = clock_.now();

  CausalModel model;
  const auto wall_start = std::chrono::steady_clock::now();
  try {
    const TimeSeriesBatch batch = read_csv(file);
    model = run_discovery(config_.method, batch, config_.params, config_.te, batch_id);
  } catch (const std::exception& e) {
    spdlog::error("watcher: {} could not be analysed ({}); quarantining", name, e.what());
    const auto quarantine = config_.pool_dir / "quarantine";
    fs::create_directories(quarantine);
    fs::rename(file, quarantine / file.filename());
    std::lock_guard lock(mutex_);
    quarantined_.push_back(name);
    return true;
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();

  if (config_.analysis_delay > 0.0 && !clock_.wait_until(started + config_.analysis_delay, stop)) {
    // stopped mid-analysis: leave the file for the next run
    return false;
  }
  const double published = clock_.now();
  bus_.publish(kCausalModelTopic, Message::model(std::move(model)), published);
  fs::remove(file);
  spdlog::info("watcher: analysed {} in {:.2f} s", name, wall);

  std::lock_guard lock(mutex_);
  processed_.push_back({name, batch_id, started, published, wall});
  return true;
}

void PoolWatcher::run(std::stop_token stop) {
  while (!stop.stop_requested()) {
    bool consumed = false;
    try {
      consumed = poll_once(stop);
    } catch (const std::exception& e) {
      spdlog::error("watcher: {}", e.what());
    }
    if (!consumed && !stop.stop_requested()) {
      clock_.wait_until(clock_.now() + config_.poll_interval, stop);
    }
  }
}

void PoolWatcher::start() {
  if (thread_.joinable()) return;
  thread_ = std::jthread([this](std::stop_token st) { run(st); });
}

void PoolWatcher::stop() {
  if (!thread_.joinable()) return;
  thread_.request_stop();
  thread_.join();
}

std::vector<ProcessedFile> PoolWatcher::processed() const {
  std::lock_guard lock(mutex_);
  return processed_;
}

std::vector<std::string> PoolWatcher::quarantined() const {
  std::lock_guard lock(mutex_);
  return quarantined_;
}

}  // namespace hricausal::discovery
