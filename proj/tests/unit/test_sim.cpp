#include <doctest.h>

#include <cmath>
#include <random>

#include "hricausal/bus.hpp"
#include "hricausal/config.hpp"
#include "hricausal/error.hpp"
#include "hricausal/postprocess.hpp"
#include "hricausal/sim/social_force.hpp"
#include "hricausal/stats/parcorr.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace hricausal;
using namespace hricausal::sim;

namespace {

AgentState agent(double x, double y, double vx = 0, double vy = 0, Point2D goal = {}) {
  AgentState a;
  a.pose = {x, y, 0};
  a.velocity = {vx, vy, 0};
  a.goal = goal;
  return a;
}

// Straight-line world in a long corridor, robot parked at the end of an
// open path.
WorldState corridor(Point2D human, Point2D goal, std::vector<Point2D> robot_path, RobotPath& path) {
  path.waypoints = std::move(robot_path);
  path.loop = false;
  WorldState w;
  w.bounds = {0, 0, 30, 10};
  w.human = agent(human.x, human.y, 0, 0, goal);
  w.human.agent_id = "human";
  w.robot = agent(path.waypoints[0].x, path.waypoints[0].y);
  w.robot.agent_id = "robot";
  w.waypoint = 1;
  return w;
}

// Speed of the 1-D goal-seeking ODE dv/dt = (v_des(d) - v) / tau,
// dd/dt = -v, integrated with classical RK4 on a fine grid.
double reference_speed(double d0, double duration, const SFMParams& p) {
  const double h = 1e-4;
  double d = d0, v = 0.0;
  auto accel = [&](double dist, double speed) {
    const double vdes = p.max_speed * std::min(1.0, dist / p.slowdown_radius);
    return (vdes - speed) / p.relaxation_time;
  };
  for (int i = 0; i < int(std::lround(duration / h)); ++i) {
    const double k1v = accel(d, v), k1d = -v;
    const double k2v = accel(d + 0.5 * h * k1d, v + 0.5 * h * k1v), k2d = -(v + 0.5 * h * k1v);
    const double k3v = accel(d + 0.5 * h * k2d, v + 0.5 * h * k2v), k3d = -(v + 0.5 * h * k2v);
    const double k4v = accel(d + h * k3d, v + h * k3v), k4d = -(v + h * k3v);
    v += h / 6 * (k1v + 2 * k2v + 2 * k3v + k4v);
    d += h / 6 * (k1d + 2 * k2d + 2 * k3d + k4d);
  }
  return v;
}

double surface_gap(const WorldState& w) {
  return std::hypot(w.human.pose.x - w.robot.pose.x, w.human.pose.y - w.robot.pose.y) -
         w.human.body_radius - w.robot.body_radius;
}

// Marginal CDF along one axis of the uniform law on [0,L]^2 minus the
// disc of radius r around the origin corner (r < L).
double corner_marginal_cdf(double s, double L, double r) {
  s = std::clamp(s, 0.0, L);
  auto quarter = [r](double u) {
    u = std::min(u, r);
    return 0.5 * (u * std::sqrt(r * r - u * u) + r * r * std::asin(u / r));
  };
  const double total = L * L - M_PI * r * r / 4;
  return (L * s - quarter(s)) / total;
}

}  // namespace

TEST_SUITE("sim") {
  TEST_CASE("goal attraction") {
    SFMParams p;
    auto at_goal = agent(2, 3, 0.4, -0.2, {2, 3});
    auto f = goal_attraction_force(at_goal, p);
    CHECK(f.x() == doctest::Approx(-0.4 / p.relaxation_time));
    CHECK(f.y() == doctest::Approx(0.2 / p.relaxation_time));

    auto far = agent(0, 0, 0, 0, {6, 8});
    f = goal_attraction_force(far, p);
    CHECK(f.norm() == doctest::Approx(p.max_speed / p.relaxation_time));
    CHECK(f.x() / f.norm() == doctest::Approx(0.6));

    auto half = agent(0, 0, 0, 0, {0, p.slowdown_radius / 2});
    f = goal_attraction_force(half, p);
    CHECK(f.norm() == doctest::Approx((p.max_speed / 2) / p.relaxation_time));
    CHECK(goal_attraction_force(far, p, 0.5).norm() == doctest::Approx(0.5 * p.max_speed / p.relaxation_time));
  }

  TEST_CASE("agent repulsion") {
    SFMParams p;
    auto h = agent(0, 0);
    const double R = h.body_radius * 2 + p.personal_margin;
    auto r = agent(R, 0);
    auto f = agent_repulsion_force(h, r, p);
    CHECK(f.norm() == doctest::Approx(p.repulsion_strength));
    CHECK(f.x() < 0);  // pushes the human away from the robot
    r = agent(0, R + p.repulsion_range);
    f = agent_repulsion_force(h, r, p);
    CHECK(f.norm() == doctest::Approx(p.repulsion_strength / M_E));
    CHECK(f.y() < 0);
    r = agent(R + 10 * p.repulsion_range, 0);
    CHECK(agent_repulsion_force(h, r, p).norm() < p.repulsion_strength * std::exp(-10.0) * (1 + 1e-9));
    r = agent(0, 0);
    f = agent_repulsion_force(h, r, p);
    CHECK(std::isfinite(f.norm()));
  }

  TEST_CASE("parameter validation") {
    SFMParams p;
    CHECK_NOTHROW(p.validate());
    p.repulsion_range = 0;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p = {};
    p.min_pace = 1.5;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    RobotPath one{{{1, 1}}};
    CHECK_THROWS_AS(one.validate(), ValidationError);
    RobotPath repeated{{{1, 1}, {1, 1}}};
    CHECK_THROWS_AS(repeated.validate(), ValidationError);
    CHECK_THROWS_AS((Bounds{0, 0, 0, 5}.validate()), ValidationError);
    auto rect = RobotPath::rectangle(Bounds{}, 2.0);
    CHECK(rect.waypoints.size() == 4);
    CHECK(rect.waypoints[0] == Point2D{2, 2});
    CHECK(rect.waypoints[2] == Point2D{8, 8});
  }

  TEST_CASE("step: zero forces leave positions unchanged") {
    RobotPath path;
    auto w = corridor({5, 5}, {5, 5}, {{25, 5}, {26, 5}}, path);
    w.robot = agent(26, 5);  // already at the end of the open path
    w.waypoint = 1;
    SFMParams p;
    p.repulsion_strength = 1e-300;
    auto next = step(w, 0.05, p, path);
    CHECK(next.human.pose.x == 5.0);
    CHECK(next.human.pose.y == 5.0);
    CHECK(next.robot.pose.x == 26.0);
    CHECK(next.time == doctest::Approx(0.05));
    CHECK_THROWS_AS(step(w, 0.0, p, path), ValidationError);
    CHECK_THROWS_AS(step(w, 0.2, p, path), ValidationError);
  }

  TEST_CASE("step: human reaches cruise speed like the reference ODE") {
    // Solo human: the robot sits ~27 m away, so repulsion is ~A exp(-52).
    SFMParams p;
    RobotPath path;
    auto w = corridor({1, 5}, {25, 5}, {{28.9, 9.5}, {29, 9.5}}, path);
    for (int i = 0; i < 100; ++i) w = step(w, 0.05, p, path);
    const double speed = std::hypot(w.human.velocity.vx, w.human.velocity.vy);
    const double ref = reference_speed(24.0, 5.0, p);
    CHECK(std::fabs(speed - p.max_speed) <= 0.05 * p.max_speed);
    CHECK(std::fabs(speed - ref) <= 0.05 * p.max_speed);
    CHECK(w.time == doctest::Approx(5.0));
  }

  TEST_CASE("step: human steers around a robot standing on the line") {
    const auto p = ScenarioConfig{}.sfm;
    RobotPath path;
    auto w = corridor({2, 5}, {14, 5}, {{8, 5.05}, {8, 5.1}}, path);
    const double R = w.human.body_radius + w.robot.body_radius + p.personal_margin;
    double deviation = 0.0, min_gap = 1e9;
    while (w.time < 30 && w.goals_reached == 0) {
      w = step(w, 0.05, p, path);
      deviation = std::max(deviation, std::fabs(w.human.pose.y - 5.0));
      min_gap = std::min(min_gap, surface_gap(w));
    }
    CHECK(w.goals_reached == 1);  // got past the robot
    CHECK(deviation > R);
    CHECK(min_gap > 0.0);
  }

  TEST_CASE("sample_goal") {
    Bounds b;
    std::mt19937_64 a(5), c(5);
    for (int i = 0; i < 20; ++i) {
      auto g1 = sample_goal(a, b, {1, 1}, 3);
      auto g2 = sample_goal(c, b, {1, 1}, 3);
      CHECK(g1 == g2);
    }
    std::mt19937_64 rng(11);
    std::vector<double> xs, ys;
    for (int i = 0; i < 10000; ++i) {
      auto g = sample_goal(rng, b, {0, 0}, 3);
      CHECK(b.contains(g));
      CHECK(std::hypot(g.x, g.y) >= 3.0);
      xs.push_back(g.x);
      ys.push_back(g.y);
    }
    auto cdf = [](double s) { return corner_marginal_cdf(s, 10.0, 3.0); };
    CHECK(oracle::ks_pvalue(xs, cdf) > 0.01);
    CHECK(oracle::ks_pvalue(ys, cdf) > 0.01);
    // a plain uniform CDF is rejected, so the test has power
    CHECK(oracle::ks_pvalue(xs, [](double s) { return s / 10.0; }) < 0.01);

    // nothing in a 1x1 box is 3 m away; 1.5 m is reachable from a corner
    std::mt19937_64 r2(3);
    Bounds small{0, 0, 1.2, 1.2};
    auto relaxed = sample_goal(r2, small, {0, 0}, 3.0);
    CHECK(std::hypot(relaxed.x, relaxed.y) >= 1.5);
    CHECK_THROWS_AS(sample_goal(r2, Bounds{0, 0, 1, 1}, {0, 0}, 3.0), ValidationError);
  }

  TEST_CASE("default scenario invariants over 10 seeds") {
    ScenarioConfig cfg;
    std::size_t resamples = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      cfg.seed = seed;
      auto setup = cfg.scenario_setup();
      auto w = initial_world(setup);
      double min_gap = surface_gap(w);
      double max_speed = 0.0;
      bool inside = true, progress = true;
      WorldState first = w;
      while (w.time < cfg.duration - 1e-9) {
        const auto prev = w;
        w = step(w, setup.dt_sim, setup.sfm, setup.path);
        min_gap = std::min(min_gap, surface_gap(w));
        max_speed = std::max(max_speed, std::hypot(w.human.velocity.vx, w.human.velocity.vy));
        inside = inside && w.bounds.contains(w.human.pose.position()) &&
                 w.bounds.contains(w.robot.pose.position());
        if (w.goals_reached != prev.goals_reached) {
          ++resamples;
          AgentState reached = w.human;
          reached.goal = prev.human.goal;
          progress = progress && goal_distance(reached) <= setup.sfm.goal_radius;
        }
      }
      CHECK(min_gap > 0.0);
      CHECK(max_speed <= setup.sfm.max_speed + 1e-9);
      CHECK(inside);
      CHECK(progress);

      // determinism: a second run lands on the same state
      auto again = initial_world(setup);
      CHECK(again.human == first.human);
      while (again.time < cfg.duration - 1e-9) again = step(again, setup.dt_sim, setup.sfm, setup.path);
      CHECK(again.human == w.human);
      CHECK(again.robot == w.robot);
    }
    CHECK(resamples > 10);
  }

  TEST_CASE("default scenario produces the expected lagged dependencies") {
    ScenarioConfig cfg;
    auto setup = cfg.scenario_setup();
    auto w = initial_world(setup);
    const int every = int(std::lround(cfg.collector.dt / setup.dt_sim));
    std::vector<double> v, dg, risk;
    for (int k = 0; w.time < cfg.duration - 1e-9; ++k) {
      if (k % every == 0) {
        v.push_back(human_speed(w.human));
        dg.push_back(goal_distance(w.human));
        risk.push_back(collision_risk(w.human, w.robot, cfg.risk));
      }
      w = step(w, setup.dt_sim, setup.sfm, setup.path);
    }
    CHECK(v.size() == 500);
    auto lag = [](const std::vector<double>& s, std::size_t k) {
      return std::vector<double>(s.begin() + 1 - k, s.end() - k);
    };
    // h_v(t-1) -> h_dg(t) given h_dg(t-1), and h_risk(t-1) -> h_v(t) given h_v(t-1)
    auto dg_now = lag(dg, 0), dg_prev = lag(dg, 1), v_now = lag(v, 0), v_prev = lag(v, 1);
    auto risk_prev = lag(risk, 1);
    std::vector<stats::SeriesView> z1{dg_prev}, z2{v_prev};
    CHECK(stats::parcorr_test(v_prev, dg_now, z1).p_value < 0.05);
    CHECK(stats::parcorr_test(risk_prev, v_now, z2).p_value < 0.05);
  }

  TEST_CASE("scenario publishes both agents") {
    Bus bus;
    register_pipeline_topics(bus);
    auto h = bus.subscribe(kHumanTopic, 1024);
    auto r = bus.subscribe(kRobotTopic, 1024);
    ScenarioSetup setup;
    Scenario sc(setup, &bus);
    sc.publish_initial();
    for (int i = 0; i < 20; ++i) sc.advance();
    auto hs = h.drain();
    auto rs = r.drain();
    REQUIRE(hs.size() == 21);
    REQUIRE(rs.size() == 21);
    CHECK(hs.back().publish_time == doctest::Approx(1.0));
    CHECK(hs.back().payload.agent_state().agent_id == "human");
    CHECK(rs.back().payload.agent_state().agent_id == "robot");
  }
}
