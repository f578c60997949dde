#include "hricausal/state.hpp"

#include <cmath>
#include <numbers>

#include "hricausal/bus.hpp"
#include "hricausal/error.hpp"

namespace hricausal {

std::string_view topic_for(AgentRole role) {
  return role == AgentRole::Robot ? kRobotTopic : kHumanTopic;
}

double normalize_angle(double theta) {
  double wrapped = std::remainder(theta, 2.0 * std::numbers::pi);
  if (wrapped <= -std::numbers::pi) wrapped += 2.0 * std::numbers::pi;
  return wrapped;
}

void validate(const AgentState& s) {
  const double fields[] = {s.stamp,       s.pose.x,      s.pose.y,         s.pose.theta,
                           s.velocity.vx, s.velocity.vy, s.velocity.omega, s.goal.x,
                           s.goal.y,      s.body_radius};
  for (double v : fields) {
    if (!std::isfinite(v)) throw ValidationError("agent state '" + s.agent_id + "' has a non-finite field");
  }
  if (s.stamp < 0.0) throw ValidationError("agent state stamp must be non-negative");
  if (s.body_radius <= 0.0) throw ValidationError("agent body radius must be positive");
}

StateMerger::StateMerger(AgentRole role, std::string agent_id, double body_radius, Bus* bus)
    : role_(role), agent_id_(std::move(agent_id)), body_radius_(body_radius), bus_(bus) {
  if (!(body_radius_ > 0.0) || !std::isfinite(body_radius_)) {
    throw ValidationError("body radius must be positive and finite");
  }
}

AgentState StateMerger::merge(const Pose2D& pose, const Velocity2D& velocity,
                              const Point2D& goal, double stamp) {
  AgentState state;
  state.agent_id = agent_id_;
  state.stamp = stamp;
  state.pose = pose;
  state.velocity = velocity;
  state.goal = goal;
  state.body_radius = body_radius_;
  validate(state);
  if (last_stamp_ && stamp <= *last_stamp_) {
    throw ValidationError("stamps of '" + agent_id_ + "' must strictly increase");
  }
  state.pose.theta = normalize_angle(pose.theta);
  last_stamp_ = stamp;

  if (bus_) {
    Message msg = role_ == AgentRole::Robot ? Message::robot(state) : Message::human(state);
    bus_->publish(topic_for(role_), std::move(msg), stamp);
  }
  return state;
}

}  // namespace hricausal
