#pragma once

#include <atomic>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <stop_token>
#include <string>
#include <thread>
#include <vector>

#include "hricausal/bus.hpp"
#include "hricausal/causal_model.hpp"
#include "hricausal/clock.hpp"

namespace hricausal::discovery {

struct WatcherConfig {
  std::filesystem::path pool_dir = "csv_pool";
  double poll_interval = 1.0;   ///< simulated seconds between empty polls
  double analysis_delay = 0.0;  ///< extra simulated time each analysis takes (testing hook)
  DiscoveryMethod method = DiscoveryMethod::FPCMCI;
  DiscoveryParams params;
  stats::TEParams te;
};

struct ProcessedFile {
  std::string filename;
  std::string batch_id;
  double started_at = 0.0;    ///< simulated time
  double published_at = 0.0;  ///< simulated time
  double wall_seconds = 0.0;  ///< time spent in discovery
};

/// CSV files waiting in the pool, oldest (lexicographically smallest) first.
/// Hidden files and subdirectories are ignored.
std::vector<std::filesystem::path> pending_files(const std::filesystem::path& pool_dir);

/// Batch id derived from a pool filename: the batch index for
/// "data_<index>_<t0>.csv", otherwise the file stem.
std::string batch_id_for(const std::filesystem::path& file);

/// Consumes the pool: analyses the oldest CSV, publishes the model on the
/// causal-model topic, then deletes the file. Unreadable files are moved to
/// `<pool>/quarantine`. Files are handled strictly one at a time.
class PoolWatcher {
 public:
  PoolWatcher(Bus& bus, SimClock& clock, WatcherConfig config);
  ~PoolWatcher();

  PoolWatcher(const PoolWatcher&) = delete;
  PoolWatcher& operator=(const PoolWatcher&) = delete;

  /// Handles at most one file. Returns true if a file was consumed (analysed
  /// or quarantined). Blocks on the clock for `analysis_delay`.
  bool poll_once(std::stop_token stop = {});

  /// Runs poll_once in a dedicated thread, idling `poll_interval` simulated
  /// seconds whenever the pool is empty.
  void start();
  void stop();

  /// True while a poll is in progress.
  bool busy() const { return busy_.load(); }

  std::vector<ProcessedFile> processed() const;
  std::vector<std::string> quarantined() const;
  const WatcherConfig& config() const { return config_; }

 private:
  void run(std::stop_token stop);

  Bus& bus_;
  SimClock& clock_;
  WatcherConfig config_;
  std::atomic<bool> busy_{false};
  mutable std::mutex mutex_;
  std::vector<ProcessedFile> processed_;
  std::vector<std::string> quarantined_;
  std::jthread thread_;
};

}  // namespace hricausal::discovery
