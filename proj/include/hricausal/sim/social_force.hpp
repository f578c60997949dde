#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "hricausal/state.hpp"

namespace hricausal {
class Bus;
}

namespace hricausal::sim {

/// Social-force parameters of the simulated pedestrian.
struct SFMParams {
  double relaxation_time = 0.5;     ///< s
  double max_speed = 1.4;           ///< desired cruising speed, m/s
  double repulsion_strength = 2.0;  ///< A, m/s^2
  double repulsion_range = 1.0;     ///< B, m
  double slowdown_radius = 1.5;     ///< distance to goal where braking starts, m
  double goal_radius = 0.3;         ///< goal counts as reached inside this radius, m
  double personal_margin = 0.3;     ///< added to the summed body radii, m
  double goal_min_distance = 3.0;   ///< new goals are at least this far away, m
  /// Walking pace: every new goal draws a desired-speed factor uniformly in
  /// [min_pace, 1]. 1 gives every leg the full max_speed.
  double min_pace = 1.0;

  void validate() const;
};

struct Bounds {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 10.0;
  double y_max = 10.0;

  bool contains(const Point2D& p) const {
    return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
  }
  void validate() const;
};

/// Closed (or open) polyline the robot follows at constant speed.
struct RobotPath {
  std::vector<Point2D> waypoints;
  double cruise_speed = 0.6;
  bool loop = true;

  void validate() const;
  /// Rectangle inset from the bounds, counter-clockwise from the lower-left corner.
  static RobotPath rectangle(const Bounds& bounds, double inset, double cruise_speed = 0.6);
};

struct WorldState {
  double time = 0.0;
  AgentState human;
  AgentState robot;
  Bounds bounds;
  std::mt19937_64 rng;
  std::size_t waypoint = 0;       ///< index of the waypoint the robot is heading to
  std::size_t goals_reached = 0;
  double pace = 1.0;              ///< desired-speed factor of the current leg
};

/// (v_des * e_goal - v) / tau_r with v_des = v_max * factor * min(1, d_goal / d_slow).
/// An agent sitting on its goal only brakes.
Eigen::Vector2d goal_attraction_force(const AgentState& agent, const SFMParams& params,
                                      double speed_factor = 1.0);

/// A * exp((R - d) / B) along the robot-to-human direction, R being the summed
/// radii plus the personal margin. d is clamped to 1e-6.
Eigen::Vector2d agent_repulsion_force(const AgentState& human, const AgentState& robot,
                                      const SFMParams& params);

/// Uniform point in `bounds` at least `min_dist` from `current`. After 1000
/// rejections the distance is halved once; a second failure throws.
Point2D sample_goal(std::mt19937_64& rng, const Bounds& bounds, const Point2D& current,
                    double min_dist);

/// Advances the world by dt_sim in (0, 0.1]. The human integrates the social
/// force with semi-implicit Euler (speed clamped to max_speed) and draws a new
/// goal once inside goal_radius; the robot moves along the path at cruise
/// speed. Agents are kept inside the bounds.
WorldState step(const WorldState& world, double dt_sim, const SFMParams& params,
                const RobotPath& path);

struct ScenarioSetup {
  SFMParams sfm;
  RobotPath path = RobotPath::rectangle(Bounds{}, 2.0);
  Bounds bounds;
  double human_radius = 0.3;
  double robot_radius = 0.3;
  double dt_sim = 0.05;
  std::uint64_t seed = 0;
};

/// Deterministic starting world for a setup: robot on the first waypoint,
/// human and its goal drawn from the seeded generator.
WorldState initial_world(const ScenarioSetup& setup);

/// Owns the world, steps it and publishes both agent states on the bus.
class Scenario {
 public:
  explicit Scenario(const ScenarioSetup& setup, Bus* bus = nullptr);

  /// Publishes the initial states (stamp 0). Called once before advance().
  void publish_initial();
  const WorldState& advance();

  const WorldState& world() const { return world_; }
  const ScenarioSetup& setup() const { return setup_; }

 private:
  void publish();

  ScenarioSetup setup_;
  WorldState world_;
  StateMerger human_merger_;
  StateMerger robot_merger_;
};

}  // namespace hricausal::sim
