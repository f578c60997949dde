#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace hricausal {

class Bus;

inline constexpr std::string_view kRobotTopic = "/roscausal/robot";
inline constexpr std::string_view kHumanTopic = "/roscausal/human";

struct Point2D {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2D&, const Point2D&) = default;
};

/// Planar pose. `theta` is kept in (-pi, pi].
struct Pose2D {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  Point2D position() const { return {x, y}; }
  friend bool operator==(const Pose2D&, const Pose2D&) = default;
};

struct Velocity2D {
  double vx = 0.0;
  double vy = 0.0;
  double omega = 0.0;

  friend bool operator==(const Velocity2D&, const Velocity2D&) = default;
};

/// Full state of one agent; payload of both the robot and the human topics.
struct AgentState {
  std::string agent_id;
  double stamp = 0.0;
  Pose2D pose;
  Velocity2D velocity;
  Point2D goal;
  double body_radius = 0.3;

  friend bool operator==(const AgentState&, const AgentState&) = default;
};

enum class AgentRole { Robot, Human };

std::string_view topic_for(AgentRole role);

/// Wraps an angle into (-pi, pi].
double normalize_angle(double theta);

/// Throws ValidationError unless every field is finite, the stamp is
/// non-negative and the body radius positive.
void validate(const AgentState& state);

/// Merges pose, velocity and goal readings of one agent into AgentState
/// messages and, when given a bus, publishes them on the role's topic.
///
/// Stamps must strictly increase from one merge to the next.
class StateMerger {
 public:
  StateMerger(AgentRole role, std::string agent_id, double body_radius,
              Bus* bus = nullptr);

  AgentState merge(const Pose2D& pose, const Velocity2D& velocity,
                   const Point2D& goal, double stamp);

  AgentRole role() const { return role_; }
  const std::string& agent_id() const { return agent_id_; }

 private:
  AgentRole role_;
  std::string agent_id_;
  double body_radius_;
  Bus* bus_;
  std::optional<double> last_stamp_;
};

}  // namespace hricausal
