#pragma once

#include <cstddef>
#include <deque>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hricausal/bus.hpp"
#include "hricausal/postprocess.hpp"
#include "hricausal/raw_sample.hpp"

namespace hricausal {

struct CollectorConfig {
  double dt = 0.3;
  double batch_seconds = 150.0;
  std::filesystem::path pool_dir = "csv_pool";
  std::string postprocessor = "hri_basic";
  std::size_t queue_capacity = kDefaultQueueCapacity;

  std::size_t samples_per_batch() const;
  /// Checks dt, batch length and queue capacity without touching the disk.
  void validate_values() const;
  /// validate_values() plus creating pool_dir if missing and probing it.
  void validate() const;
};

/// "data_<6-digit index>_<12-digit t0 in ms>.csv"; lexicographic order is
/// creation order.
std::string batch_filename(std::size_t index, double t0);

/// Runs the postprocessor over `buffer` and atomically writes the result into
/// `pool_dir`. Throws whatever the postprocessor throws.
std::filesystem::path finalize_batch(std::span<const RawSample> buffer,
                                     const Postprocessor& postprocessor, double dt,
                                     const std::filesystem::path& pool_dir, std::size_t index);

struct EmittedBatch {
  std::size_t index = 0;
  double t0 = 0.0;
  double emit_time = 0.0;
  std::filesystem::path path;
};

/// Samples the robot and human topics on a fixed grid (zero-order hold),
/// accumulates fixed-length buffers and drops finished batches into the pool.
///
/// Messages are matched to grid points by stamp, so a sample at grid time g
/// always holds the newest state stamped at or before g, even if tick() runs
/// late. A grid point that fires before any message has arrived on one of the
/// topics is skipped and the batch window extends.
class Collector {
 public:
  Collector(Bus& bus, CollectorConfig config, RiskParams risk = {}, double start_time = 0.0);

  /// Processes every grid point up to `now`; returns the last sample taken,
  /// if any.
  std::optional<RawSample> tick(double now);

  const CollectorConfig& config() const { return config_; }
  const std::vector<EmittedBatch>& emitted() const { return emitted_; }
  std::size_t failed_batches() const { return failed_; }
  std::size_t skipped_samples() const { return skipped_; }
  std::size_t buffered() const { return buffer_.size(); }
  double next_grid_time() const;

 private:
  void absorb();
  std::optional<RawSample> sample_at(double grid_time);
  void emit(double now);

  CollectorConfig config_;
  Postprocessor postprocessor_;
  Subscription robot_sub_;
  Subscription human_sub_;
  std::deque<AgentState> robot_pending_;
  std::deque<AgentState> human_pending_;
  std::optional<AgentState> robot_latest_;
  std::optional<AgentState> human_latest_;
  double start_time_;
  std::size_t grid_index_ = 0;
  std::size_t batch_index_ = 0;
  std::vector<RawSample> buffer_;
  std::vector<EmittedBatch> emitted_;
  std::size_t failed_ = 0;
  std::size_t skipped_ = 0;
};

}  // namespace hricausal
