#include "hricausal/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include <spdlog/spdlog.h>

#include "hricausal/error.hpp"

namespace hricausal {

void RiskParams::validate() const {
  if (!(margin > 0.0 && decay_length > 0.0 && epsilon > 0.0)) {
    throw ValidationError("risk parameters must be strictly positive");
  }
}

double human_speed(const AgentState& h) { return std::hypot(h.velocity.vx, h.velocity.vy); }

double goal_distance(const AgentState& h) {
  return std::hypot(h.goal.x - h.pose.x, h.goal.y - h.pose.y);
}

bool risk_precondition_holds(const AgentState& h, const AgentState& r, const RiskParams& p) {
  return std::hypot(r.pose.x - h.pose.x, r.pose.y - h.pose.y) > p.epsilon;
}

double collision_risk(const AgentState& h, const AgentState& r, const RiskParams& p) {
  const double dx = r.pose.x - h.pose.x;
  const double dy = r.pose.y - h.pose.y;
  const double d = std::hypot(dx, dy);
  const double vx = h.velocity.vx;
  const double vy = h.velocity.vy;

  double closing = 0.0;
  if (d > 0.0) {
    closing = (vx * dx + vy * dy) / d;
  } else {
    // no bearing: assume the worst case, heading straight at the robot
    closing = std::hypot(vx, vy);
  }
  if (d <= p.epsilon) {
    spdlog::warn("collision_risk: agents '{}' and '{}' coincide (d = {:.3g} m), clamping gap",
                 h.agent_id, r.agent_id, d);
  }
  const double reach = r.body_radius + h.body_radius + p.margin;
  const double gap = d - reach;
  return std::max(0.0, closing) * std::exp(-std::max(0.0, gap) / p.decay_length) /
         std::max(gap, p.epsilon);
}

TimeSeriesBatch postprocess_batch(std::span<const RawSample> samples, const RiskParams& params,
                                  double dt) {
  if (samples.empty()) throw ValidationError("postprocess_batch: no samples");
  TimeSeriesBatch out;
  out.variable_names = hri_columns();
  out.t0 = samples.front().t;
  out.dt = dt;
  out.rows.reserve(samples.size());
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const auto& s = samples[k];
    validate(s.human);
    validate(s.robot);
    if (!risk_precondition_holds(s.human, s.robot, params)) {
      throw ValidationError("postprocess_batch: agents coincide at sample " + std::to_string(k));
    }
    out.rows.push_back({s.t, human_speed(s.human), goal_distance(s.human),
                        collision_risk(s.human, s.robot, params)});
  }
  return out;
}

namespace {

TimeSeriesBatch identity_transform(std::span<const RawSample> samples, double dt) {
  if (samples.empty()) throw ValidationError("identity postprocessor: no samples");
  TimeSeriesBatch out;
  out.variable_names = {"time"};
  for (const char* prefix : {"h_", "r_"}) {
    for (const char* f : {"x", "y", "theta", "vx", "vy", "omega", "goal_x", "goal_y"}) {
      out.variable_names.push_back(std::string(prefix) + f);
    }
  }
  out.t0 = samples.front().t;
  out.dt = dt;
  for (const auto& s : samples) {
    std::vector<double> row{s.t};
    for (const AgentState* a : {&s.human, &s.robot}) {
      row.insert(row.end(), {a->pose.x, a->pose.y, a->pose.theta, a->velocity.vx,
                             a->velocity.vy, a->velocity.omega, a->goal.x, a->goal.y});
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

struct Registry {
  std::mutex mutex;
  std::map<std::string, PostprocessorFactory, std::less<>> factories;

  Registry() {
    factories["hri_basic"] = [](const RiskParams& risk) -> Postprocessor {
      return [risk](std::span<const RawSample> s, double dt) { return postprocess_batch(s, risk, dt); };
    };
    factories["identity"] = [](const RiskParams&) -> Postprocessor { return identity_transform; };
  }
};

Registry& registry() {
  static Registry r;
  return r;
}

}  // namespace

Postprocessor make_postprocessor(std::string_view name, const RiskParams& risk) {
  auto& reg = registry();
  std::lock_guard lock(reg.mutex);
  auto it = reg.factories.find(name);
  if (it == reg.factories.end()) {
    throw ValidationError("unknown postprocessor '" + std::string(name) + "'");
  }
  return it->second(risk);
}

void register_postprocessor(std::string name, PostprocessorFactory factory) {
  auto& reg = registry();
  std::lock_guard lock(reg.mutex);
  reg.factories[std::move(name)] = std::move(factory);
}

std::vector<std::string> postprocessor_names() {
  auto& reg = registry();
  std::lock_guard lock(reg.mutex);
  std::vector<std::string> names;
  for (const auto& [name, _] : reg.factories) names.push_back(name);
  return names;
}

}  // namespace hricausal
