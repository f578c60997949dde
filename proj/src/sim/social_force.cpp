#include "hricausal/sim/social_force.hpp"

#include <algorithm>
#include <cmath>

#include "hricausal/bus.hpp"
#include "hricausal/error.hpp"

namespace hricausal::sim {

namespace {

Eigen::Vector2d pos(const AgentState& a) { return {a.pose.x, a.pose.y}; }
Eigen::Vector2d vel(const AgentState& a) { return {a.velocity.vx, a.velocity.vy}; }

}  // namespace

void SFMParams::validate() const {
  for (double v : {relaxation_time, max_speed, repulsion_strength, repulsion_range,
                   slowdown_radius, goal_radius, personal_margin, goal_min_distance}) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError("social-force parameters must be positive");
  }
  if (!(min_pace > 0.0 && min_pace <= 1.0)) throw ValidationError("min_pace must lie in (0, 1]");
}

void Bounds::validate() const {
  if (!(x_max > x_min && y_max > y_min)) throw ValidationError("bounds must have positive extent");
}

void RobotPath::validate() const {
  if (waypoints.size() < 2) throw ValidationError("robot path needs at least 2 waypoints");
  for (std::size_t i = 0; i + 1 < waypoints.size(); ++i) {
    if (waypoints[i] == waypoints[i + 1]) throw ValidationError("consecutive waypoints must differ");
  }
  if (!(cruise_speed > 0.0)) throw ValidationError("cruise speed must be positive");
}

RobotPath RobotPath::rectangle(const Bounds& b, double inset, double cruise_speed) {
  RobotPath path;
  path.waypoints = {{b.x_min + inset, b.y_min + inset},
                    {b.x_max - inset, b.y_min + inset},
                    {b.x_max - inset, b.y_max - inset},
                    {b.x_min + inset, b.y_max - inset}};
  path.cruise_speed = cruise_speed;
  path.loop = true;
  return path;
}

Eigen::Vector2d goal_attraction_force(const AgentState& agent, const SFMParams& p, double speed_factor) {
  const Eigen::Vector2d to_goal = Eigen::Vector2d(agent.goal.x, agent.goal.y) - pos(agent);
  const double d = to_goal.norm();
  Eigen::Vector2d desired = Eigen::Vector2d::Zero();
  if (d > 0.0) desired = p.max_speed * speed_factor * std::min(1.0, d / p.slowdown_radius) * to_goal / d;
  return (desired - vel(agent)) / p.relaxation_time;
}

Eigen::Vector2d agent_repulsion_force(const AgentState& human, const AgentState& robot,
                                      const SFMParams& p) {
  Eigen::Vector2d away = pos(human) - pos(robot);
  double d = away.norm();
  if (d < 1e-6) {
    // no defined direction: push along +x
    away = Eigen::Vector2d::UnitX();
    d = 1e-6;
  } else {
    away /= d;
  }
  const double reach = human.body_radius + robot.body_radius + p.personal_margin;
  return p.repulsion_strength * std::exp((reach - d) / p.repulsion_range) * away;
}

namespace {

// the rng is only touched when pace variation is enabled
double draw_pace(std::mt19937_64& rng, const SFMParams& p) {
  if (p.min_pace >= 1.0) return 1.0;
  return std::uniform_real_distribution<double>(p.min_pace, 1.0)(rng);
}

}  // namespace

Point2D sample_goal(std::mt19937_64& rng, const Bounds& b, const Point2D& current, double min_dist) {
  std::uniform_real_distribution<double> ux(b.x_min, b.x_max);
  std::uniform_real_distribution<double> uy(b.y_min, b.y_max);
  double required = min_dist;
  for (int round = 0; round < 2; ++round) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
      const double x = ux(rng);
      const double y = uy(rng);
      if (std::hypot(x - current.x, y - current.y) >= required) return {x, y};
    }
    required *= 0.5;
  }
  throw ValidationError("sample_goal: no admissible point within the bounds");
}

WorldState step(const WorldState& world, double dt, const SFMParams& p, const RobotPath& path) {
  if (!(dt > 0.0 && dt <= 0.1)) throw ValidationError("simulation step must lie in (0, 0.1]");
  WorldState next = world;
  next.time = world.time + dt;
  const Bounds& b = world.bounds;

  // human: social force, semi-implicit Euler
  {
    const AgentState& h = world.human;
    const Eigen::Vector2d force =
        goal_attraction_force(h, p, world.pace) + agent_repulsion_force(h, world.robot, p);
    Eigen::Vector2d v = vel(h) + force * dt;
    const double speed = v.norm();
    if (speed > p.max_speed) v *= p.max_speed / speed;
    Eigen::Vector2d x = pos(h) + v * dt;
    if (x.x() < b.x_min) { x.x() = b.x_min; v.x() = std::max(0.0, v.x()); }
    if (x.x() > b.x_max) { x.x() = b.x_max; v.x() = std::min(0.0, v.x()); }
    if (x.y() < b.y_min) { x.y() = b.y_min; v.y() = std::max(0.0, v.y()); }
    if (x.y() > b.y_max) { x.y() = b.y_max; v.y() = std::min(0.0, v.y()); }

    AgentState& nh = next.human;
    const double theta = v.norm() > 1e-6 ? std::atan2(v.y(), v.x()) : h.pose.theta;
    nh.velocity.omega = normalize_angle(theta - h.pose.theta) / dt;
    nh.pose = {x.x(), x.y(), normalize_angle(theta)};
    nh.velocity.vx = v.x();
    nh.velocity.vy = v.y();
    nh.stamp = next.time;
    if (std::hypot(nh.goal.x - x.x(), nh.goal.y - x.y()) <= p.goal_radius) {
      nh.goal = sample_goal(next.rng, b, nh.pose.position(), p.goal_min_distance);
      next.pace = draw_pace(next.rng, p);
      ++next.goals_reached;
    }
  }

  // robot: constant speed along the path
  {
    const AgentState& r = world.robot;
    AgentState& nr = next.robot;
    Eigen::Vector2d x = pos(r);
    double remaining = path.cruise_speed * dt;
    std::size_t wp = world.waypoint;
    bool stopped = false;
    while (remaining > 0.0) {
      const Eigen::Vector2d target(path.waypoints[wp].x, path.waypoints[wp].y);
      const Eigen::Vector2d delta = target - x;
      const double dist = delta.norm();
      if (dist > remaining) {
        x += delta / dist * remaining;
        remaining = 0.0;
      } else {
        x = target;
        remaining -= dist;
        if (wp + 1 < path.waypoints.size()) {
          ++wp;
        } else if (path.loop) {
          wp = 0;
        } else {
          stopped = true;
          break;
        }
      }
    }
    const Eigen::Vector2d v = stopped && (x - pos(r)).norm() == 0.0 ? Eigen::Vector2d::Zero()
                                                                    : Eigen::Vector2d((x - pos(r)) / dt);
    const double theta = v.norm() > 1e-9 ? std::atan2(v.y(), v.x()) : r.pose.theta;
    nr.velocity = {v.x(), v.y(), normalize_angle(theta - r.pose.theta) / dt};
    nr.pose = {std::clamp(x.x(), b.x_min, b.x_max), std::clamp(x.y(), b.y_min, b.y_max),
               normalize_angle(theta)};
    nr.goal = path.waypoints[wp];
    nr.stamp = next.time;
    next.waypoint = wp;
  }
  return next;
}

WorldState initial_world(const ScenarioSetup& s) {
  s.sfm.validate();
  s.path.validate();
  s.bounds.validate();
  WorldState w;
  w.bounds = s.bounds;
  w.rng.seed(s.seed);

  w.robot.agent_id = "robot";
  w.robot.body_radius = s.robot_radius;
  const Point2D start = s.path.waypoints.front();
  w.robot.pose = {start.x, start.y, 0.0};
  w.waypoint = 1;
  w.robot.goal = s.path.waypoints[1];
  w.robot.pose.theta = std::atan2(w.robot.goal.y - start.y, w.robot.goal.x - start.x);

  w.human.agent_id = "human";
  w.human.body_radius = s.human_radius;
  const Point2D hp = sample_goal(w.rng, s.bounds, start, s.sfm.goal_min_distance);
  w.human.pose = {hp.x, hp.y, 0.0};
  w.human.goal = sample_goal(w.rng, s.bounds, hp, s.sfm.goal_min_distance);
  w.pace = draw_pace(w.rng, s.sfm);
  return w;
}

Scenario::Scenario(const ScenarioSetup& setup, Bus* bus)
    : setup_(setup),
      world_(initial_world(setup)),
      human_merger_(AgentRole::Human, "human", setup.human_radius, bus),
      robot_merger_(AgentRole::Robot, "robot", setup.robot_radius, bus) {
  if (!(setup_.dt_sim > 0.0 && setup_.dt_sim <= 0.1)) {
    throw ValidationError("simulation step must lie in (0, 0.1]");
  }
}

void Scenario::publish() {
  const auto& h = world_.human;
  const auto& r = world_.robot;
  human_merger_.merge(h.pose, h.velocity, h.goal, world_.time);
  robot_merger_.merge(r.pose, r.velocity, r.goal, world_.time);
}

void Scenario::publish_initial() { publish(); }

const WorldState& Scenario::advance() {
  world_ = step(world_, setup_.dt_sim, setup_.sfm, setup_.path);
  publish();
  return world_;
}

}  // namespace hricausal::sim
