#include "hricausal/collector.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include <spdlog/spdlog.h>

#include "hricausal/error.hpp"

namespace hricausal {

std::size_t CollectorConfig::samples_per_batch() const {
  return static_cast<std::size_t>(std::llround(batch_seconds / dt));
}

void CollectorConfig::validate_values() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("collector dt must be positive");
  if (!(batch_seconds >= 2.0 * dt) || !std::isfinite(batch_seconds)) {
    throw ValidationError("batch_seconds must be at least 2*dt");
  }
  if (queue_capacity == 0) throw ValidationError("queue capacity must be positive");
}

void CollectorConfig::validate() const {
  validate_values();
  std::error_code ec;
  std::filesystem::create_directories(pool_dir, ec);
  if (!std::filesystem::is_directory(pool_dir)) {
    throw ValidationError("pool directory is not usable: " + pool_dir.string());
  }
  const auto probe = pool_dir / ".write_probe";
  {
    std::ofstream out(probe);
    if (!out) throw ValidationError("pool directory is not writable: " + pool_dir.string());
  }
  std::filesystem::remove(probe, ec);
}

std::string batch_filename(std::size_t index, double t0) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "data_%06zu_%012lld.csv", index,
                static_cast<long long>(std::llround(t0 * 1000.0)));
  return buf;
}

std::filesystem::path finalize_batch(std::span<const RawSample> buffer,
                                     const Postprocessor& postprocessor, double dt,
                                     const std::filesystem::path& pool_dir, std::size_t index) {
  if (buffer.empty()) throw ValidationError("finalize_batch: empty buffer");
  TimeSeriesBatch batch = postprocessor(buffer, dt);
  batch.validate();
  auto path = pool_dir / batch_filename(index, buffer.front().t);
  write_csv_atomic(batch, path);
  return path;
}

Collector::Collector(Bus& bus, CollectorConfig config, RiskParams risk, double start_time)
    : config_(std::move(config)),
      postprocessor_(make_postprocessor(config_.postprocessor, risk)),
      robot_sub_(bus.subscribe(kRobotTopic, config_.queue_capacity)),
      human_sub_(bus.subscribe(kHumanTopic, config_.queue_capacity)),
      start_time_(start_time) {
  config_.validate();
  buffer_.reserve(config_.samples_per_batch());
}

double Collector::next_grid_time() const {
  return start_time_ + static_cast<double>(grid_index_) * config_.dt;
}

void Collector::absorb() {
  for (auto& env : robot_sub_.drain()) robot_pending_.push_back(env.payload.agent_state());
  for (auto& env : human_sub_.drain()) human_pending_.push_back(env.payload.agent_state());
}

std::optional<RawSample> Collector::sample_at(double grid_time) {
  const double tol = 1e-9 * std::max(1.0, std::abs(grid_time));
  auto latch = [&](std::deque<AgentState>& pending, std::optional<AgentState>& latest) {
    while (!pending.empty() && pending.front().stamp <= grid_time + tol) {
      latest = std::move(pending.front());
      pending.pop_front();
    }
  };
  latch(robot_pending_, robot_latest_);
  latch(human_pending_, human_latest_);
  if (!robot_latest_ || !human_latest_) {
    ++skipped_;
    spdlog::warn("collector: no {} state yet at t = {:.3f}, skipping sample",
                 !robot_latest_ ? "robot" : "human", grid_time);
    return std::nullopt;
  }
  return RawSample{grid_time, *human_latest_, *robot_latest_};
}

void Collector::emit(double now) {
  const std::size_t index = batch_index_++;
  try {
    auto path = finalize_batch(buffer_, postprocessor_, config_.dt, config_.pool_dir, index);
    emitted_.push_back({index, buffer_.front().t, now, path});
    spdlog::info("collector: wrote {} ({} rows)", path.filename().string(), buffer_.size());
  } catch (const std::exception& e) {
    ++failed_;
    spdlog::error("collector: batch {} discarded: {}", index, e.what());
  }
  buffer_.clear();
}

std::optional<RawSample> Collector::tick(double now) {
  absorb();
  std::optional<RawSample> last;
  const std::size_t per_batch = config_.samples_per_batch();
  while (true) {
    const double grid = next_grid_time();
    if (now < grid - 1e-9 * std::max(1.0, std::abs(grid))) break;
    ++grid_index_;
    auto sample = sample_at(grid);
    if (!sample) continue;
    buffer_.push_back(*sample);
    last = std::move(sample);
    if (buffer_.size() >= per_batch) emit(now);
  }
  return last;
}

}  // namespace hricausal
