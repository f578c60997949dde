#include "hricausal/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "hricausal/error.hpp"

namespace hricausal {

using nlohmann::json;

namespace {

/// Reads keys of one JSON object, collecting problems instead of throwing.
class Reader {
 public:
  Reader(const json& doc, std::string where, std::vector<std::string>& errors)
      : doc_(doc), where_(std::move(where)), errors_(errors) {
    if (!doc_.is_object()) {
      fail("", "expected an object");
      ok_ = false;
    }
  }

  template <class T>
  void get(const char* key, T& out) {
    if (!ok_ || !doc_.contains(key)) return;
    seen_.insert(key);
    try {
      out = doc_.at(key).get<T>();
    } catch (const json::exception&) {
      fail(key, "has the wrong type");
    }
  }

  /// Calls f(value) for a present key, turning thrown errors into messages.
  template <class F>
  void with(const char* key, F&& f) {
    if (!ok_ || !doc_.contains(key)) return;
    seen_.insert(key);
    try {
      f(doc_.at(key));
    } catch (const json::exception&) {
      fail(key, "has the wrong type");
    } catch (const Error& e) {
      fail(key, e.what());
    }
  }

  std::string path(const char* key) const { return where_.empty() ? key : where_ + "." + key; }

  ~Reader() {
    if (!ok_) return;
    for (const auto& [key, value] : doc_.items()) {
      if (!seen_.count(key)) fail(key.c_str(), "is not a recognised key");
    }
  }

 private:
  void fail(const std::string& key, const std::string& what) {
    const std::string p = key.empty() ? (where_.empty() ? "config" : where_) : path(key.c_str());
    errors_.push_back(p + " " + what);
  }

  const json& doc_;
  std::string where_;
  std::vector<std::string>& errors_;
  std::set<std::string> seen_;
  bool ok_ = true;
};

/// Reads the discovery section. Watcher keys (method, timing) go into `run`
/// when given and are accepted but ignored otherwise.
void read_discovery(const json& doc, const std::string& where, DiscoveryParams& p,
                    std::vector<std::string>& errors, ScenarioConfig* run = nullptr) {
  Reader r(doc, where, errors);
  ScenarioConfig scratch;
  ScenarioConfig& w = run ? *run : scratch;
  r.with("method", [&](const json& m) { w.method = parse_method(m.get<std::string>()); });
  r.get("poll_interval", w.poll_interval);
  r.get("analysis_delay", w.analysis_delay);
  r.get("alpha", p.alpha);
  r.get("tau_min", p.tau_min);
  r.get("tau_max", p.tau_max);
  r.with("ci_test", [&](const json& v) { p.ci_test = stats::parse_ci_test(v.get<std::string>()); });
  r.get("max_conditions", p.max_conditions);
  r.with("pc_alpha", [&](const json& v) {
    if (v.is_null()) p.pc_alpha.reset();
    else p.pc_alpha = v.get<double>();
  });
  r.with("kernel", [&](const json& v) {
    Reader k(v, r.path("kernel"), errors);
    k.get("ridge", p.kernel.ridge);
    k.get("permutations", p.kernel.permutations);
  });
}

void read_te(const json& doc, const std::string& where, stats::TEParams& te,
             std::vector<std::string>& errors) {
  Reader r(doc, where, errors);
  r.get("history", te.history);
  r.get("bins", te.bins);
  r.get("shuffles", te.shuffles);
  r.get("quantile", te.quantile);
}

json discovery_json(const DiscoveryParams& p) {
  json k = {{"ridge", p.kernel.ridge}, {"permutations", p.kernel.permutations}};
  return {{"alpha", p.alpha},
          {"tau_min", p.tau_min},
          {"tau_max", p.tau_max},
          {"ci_test", std::string(stats::to_string(p.ci_test))},
          {"max_conditions", p.max_conditions},
          {"pc_alpha", p.pc_alpha ? json(*p.pc_alpha) : json(nullptr)},
          {"kernel", k}};
}

json te_json(const stats::TEParams& te) {
  return {{"history", te.history}, {"bins", te.bins}, {"shuffles", te.shuffles}, {"quantile", te.quantile}};
}

template <class F>
void collect(std::vector<std::string>& errors, const std::string& where, F&& f) {
  try {
    f();
  } catch (const Error& e) {
    errors.push_back(where + ": " + e.what());
  }
}

std::string join_report(const std::vector<std::string>& errors) {
  std::ostringstream out;
  out << "invalid configuration (" << errors.size() << " problem" << (errors.size() == 1 ? "" : "s") << ")";
  for (const auto& e : errors) out << "\n  - " << e;
  return out.str();
}

}  // namespace

ScenarioConfig::ScenarioConfig() {
  discovery.ci_test = stats::CITestKind::KRidgeDcor;
  // with A below v_max / tau_r the pedestrian walks through the robot's body;
  // a stronger, shorter-range push keeps the clearance positive
  sfm.repulsion_strength = 10.0;
  sfm.repulsion_range = 0.5;
  collector.pool_dir = pool_dir();
}

sim::ScenarioSetup ScenarioConfig::scenario_setup() const {
  sim::ScenarioSetup s;
  s.sfm = sfm;
  s.path = robot_path;
  s.bounds = bounds;
  s.human_radius = human_radius;
  s.robot_radius = robot_radius;
  s.dt_sim = dt_sim;
  s.seed = seed;
  return s;
}

std::vector<std::string> ScenarioConfig::validation_errors() const {
  std::vector<std::string> errors;
  collect(errors, "collector", [&] { collector.validate_values(); });
  collect(errors, "collector.postprocessor", [&] { (void)make_postprocessor(collector.postprocessor, risk); });
  collect(errors, "discovery", [&] { discovery.validate(); });
  collect(errors, "te", [&] { te.validate(); });
  collect(errors, "risk", [&] { risk.validate(); });
  collect(errors, "sfm", [&] { sfm.validate(); });
  collect(errors, "bounds", [&] { bounds.validate(); });
  collect(errors, "robot_path", [&] { robot_path.validate(); });
  for (const auto& w : robot_path.waypoints) {
    if (!bounds.contains(w)) {
      errors.push_back("robot_path: waypoint (" + std::to_string(w.x) + ", " + std::to_string(w.y) +
                       ") lies outside the bounds");
    }
  }
  if (!(poll_interval > 0.0)) errors.push_back("discovery.poll_interval must be positive");
  if (!(analysis_delay >= 0.0)) errors.push_back("discovery.analysis_delay must be non-negative");
  if (!(human_radius > 0.0) || !(robot_radius > 0.0)) errors.push_back("scenario radii must be positive");
  if (!(dt_sim > 0.0 && dt_sim <= 0.1)) errors.push_back("scenario.dt_sim must lie in (0, 0.1]");
  if (collector.dt < dt_sim) errors.push_back("collector.dt must not be finer than scenario.dt_sim");
  if (!std::isfinite(duration) || !(duration >= collector.batch_seconds)) {
    errors.push_back("duration must be finite and at least collector.batch_seconds");
  }
  if (output_dir.empty()) errors.push_back("output_dir must not be empty");
  return errors;
}

void ScenarioConfig::validate() const {
  const auto errors = validation_errors();
  if (!errors.empty()) throw ValidationError(join_report(errors));
}

std::vector<std::string> bench_method_names() { return {"pcmci-parcorr", "pcmci-kridge", "fpcmci"}; }

BenchConfig::BenchConfig() {
  specs = {bench::single_edge_spec(0), bench::linear_chain_spec(0), bench::nonlinear_spec(0),
           bench::sparse_six_spec(0)};
}

std::vector<std::string> BenchConfig::validation_errors() const {
  std::vector<std::string> errors;
  if (specs.empty()) errors.push_back("bench.specs must not be empty");
  for (const auto& s : specs) collect(errors, "bench.specs[" + s.name + "]", [&] { s.validate(); });
  const auto known = bench_method_names();
  if (methods.empty()) errors.push_back("bench.methods must not be empty");
  for (const auto& m : methods) {
    if (std::find(known.begin(), known.end(), m) == known.end()) {
      errors.push_back("bench.methods: unknown method '" + m + "'");
    }
  }
  if (seeds == 0) errors.push_back("bench.seeds must be positive");
  collect(errors, "discovery", [&] { discovery.validate(); });
  collect(errors, "te", [&] { te.validate(); });
  if (output_dir.empty()) errors.push_back("output_dir must not be empty");
  return errors;
}

void BenchConfig::validate() const {
  const auto errors = validation_errors();
  if (!errors.empty()) throw ValidationError(join_report(errors));
}

ScenarioConfig scenario_from_json(const json& doc, ScenarioConfig c) {
  std::vector<std::string> errors;
  {
    Reader r(doc, "", errors);
    r.get("seed", c.seed);
    r.get("duration", c.duration);
    r.with("output_dir", [&](const json& v) { c.output_dir = v.get<std::string>(); });
    r.with("collector", [&](const json& v) {
      Reader k(v, "collector", errors);
      k.get("dt", c.collector.dt);
      k.get("batch_seconds", c.collector.batch_seconds);
      k.get("postprocessor", c.collector.postprocessor);
      k.get("queue_capacity", c.collector.queue_capacity);
    });
    r.with("discovery", [&](const json& v) { read_discovery(v, "discovery", c.discovery, errors, &c); });
    r.with("te", [&](const json& v) { read_te(v, "te", c.te, errors); });
    r.with("risk", [&](const json& v) {
      Reader k(v, "risk", errors);
      k.get("margin", c.risk.margin);
      k.get("decay_length", c.risk.decay_length);
      k.get("epsilon", c.risk.epsilon);
    });
    r.with("sfm", [&](const json& v) {
      Reader k(v, "sfm", errors);
      k.get("relaxation_time", c.sfm.relaxation_time);
      k.get("max_speed", c.sfm.max_speed);
      k.get("repulsion_strength", c.sfm.repulsion_strength);
      k.get("repulsion_range", c.sfm.repulsion_range);
      k.get("slowdown_radius", c.sfm.slowdown_radius);
      k.get("goal_radius", c.sfm.goal_radius);
      k.get("personal_margin", c.sfm.personal_margin);
      k.get("goal_min_distance", c.sfm.goal_min_distance);
      k.get("min_pace", c.sfm.min_pace);
    });
    bool path_given = false;
    r.with("scenario", [&](const json& v) {
      Reader k(v, "scenario", errors);
      k.get("human_radius", c.human_radius);
      k.get("robot_radius", c.robot_radius);
      k.get("dt_sim", c.dt_sim);
      k.with("bounds", [&](const json& b) {
        Reader kb(b, "scenario.bounds", errors);
        kb.get("x_min", c.bounds.x_min);
        kb.get("y_min", c.bounds.y_min);
        kb.get("x_max", c.bounds.x_max);
        kb.get("y_max", c.bounds.y_max);
      });
    });
    r.with("robot_path", [&](const json& v) {
      path_given = true;
      Reader k(v, "robot_path", errors);
      double inset = -1.0;
      k.get("inset", inset);
      k.get("cruise_speed", c.robot_path.cruise_speed);
      k.get("loop", c.robot_path.loop);
      k.with("waypoints", [&](const json& w) {
        c.robot_path.waypoints.clear();
        for (const auto& p : w) c.robot_path.waypoints.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
        inset = -1.0;
      });
      if (inset >= 0.0) {
        const double speed = c.robot_path.cruise_speed;
        const bool loop = c.robot_path.loop;
        c.robot_path = sim::RobotPath::rectangle(c.bounds, inset, speed);
        c.robot_path.loop = loop;
      }
    });
    if (!path_given && doc.is_object() && doc.contains("scenario")) {
      // the default rectangle follows the configured bounds
      const double speed = c.robot_path.cruise_speed;
      c.robot_path = sim::RobotPath::rectangle(c.bounds, 2.0, speed);
    }
    r.with("bench", [](const json&) {});  // read by bench_from_json
  }
  c.collector.pool_dir = c.pool_dir();
  if (!errors.empty()) throw ValidationError(join_report(errors));
  return c;
}

namespace {

bench::SCMSpec spec_from_json(const json& doc, const std::string& where, std::vector<std::string>& errors) {
  bench::SCMSpec s;
  Reader r(doc, where, errors);
  r.get("name", s.name);
  r.get("n_vars", s.n_vars);
  r.get("noise_std", s.noise_std);
  r.get("n_samples", s.n_samples);
  r.with("edges", [&](const json& edges) {
    std::size_t i = 0;
    for (const auto& e : edges) {
      bench::SCMEdge edge;
      Reader k(e, where + ".edges[" + std::to_string(i++) + "]", errors);
      k.get("source", edge.source);
      k.get("target", edge.target);
      k.get("lag", edge.lag);
      k.get("coefficient", edge.coefficient);
      k.with("link", [&](const json& v) { edge.link = bench::parse_link(v.get<std::string>()); });
      k.get("scale", edge.scale);
      s.edges.push_back(edge);
    }
  });
  return s;
}

}  // namespace

BenchConfig bench_from_json(const json& doc, BenchConfig c) {
  std::vector<std::string> errors;
  if (!doc.is_object()) errors.push_back("config expected an object");
  if (doc.is_object()) {
    if (doc.contains("seed")) {
      try {
        c.base_seed = doc.at("seed").get<std::uint64_t>();
      } catch (const json::exception&) {
        errors.push_back("seed has the wrong type");
      }
    }
    if (doc.contains("output_dir") && doc.at("output_dir").is_string()) {
      c.output_dir = doc.at("output_dir").get<std::string>();
    }
    if (doc.contains("discovery")) read_discovery(doc.at("discovery"), "discovery", c.discovery, errors);
    if (doc.contains("te")) read_te(doc.at("te"), "te", c.te, errors);
    if (doc.contains("bench")) {
      Reader r(doc.at("bench"), "bench", errors);
      r.get("seeds", c.seeds);
      r.get("methods", c.methods);
      r.with("specs", [&](const json& specs) {
        c.specs.clear();
        std::size_t i = 0;
        for (const auto& s : specs) c.specs.push_back(spec_from_json(s, "bench.specs[" + std::to_string(i++) + "]", errors));
      });
    }
  }
  if (!errors.empty()) throw ValidationError(join_report(errors));
  return c;
}

nlohmann::json spec_to_json(const bench::SCMSpec& s) {
  json edges = json::array();
  for (const auto& e : s.edges) {
    edges.push_back({{"source", e.source},
                     {"target", e.target},
                     {"lag", e.lag},
                     {"coefficient", e.coefficient},
                     {"link", std::string(bench::to_string(e.link))},
                     {"scale", e.scale}});
  }
  return {{"name", s.name}, {"n_vars", s.n_vars}, {"edges", edges}, {"noise_std", s.noise_std},
          {"n_samples", s.n_samples}};
}

json scenario_to_json(const ScenarioConfig& c) {
  json d = discovery_json(c.discovery);
  d["method"] = std::string(to_string(c.method));
  d["poll_interval"] = c.poll_interval;
  d["analysis_delay"] = c.analysis_delay;
  json waypoints = json::array();
  for (const auto& w : c.robot_path.waypoints) waypoints.push_back({w.x, w.y});
  return {
      {"seed", c.seed},
      {"duration", c.duration},
      {"output_dir", c.output_dir.string()},
      {"collector",
       {{"dt", c.collector.dt},
        {"batch_seconds", c.collector.batch_seconds},
        {"postprocessor", c.collector.postprocessor},
        {"queue_capacity", c.collector.queue_capacity}}},
      {"discovery", d},
      {"te", te_json(c.te)},
      {"risk", {{"margin", c.risk.margin}, {"decay_length", c.risk.decay_length}, {"epsilon", c.risk.epsilon}}},
      {"sfm",
       {{"relaxation_time", c.sfm.relaxation_time},
        {"max_speed", c.sfm.max_speed},
        {"repulsion_strength", c.sfm.repulsion_strength},
        {"repulsion_range", c.sfm.repulsion_range},
        {"slowdown_radius", c.sfm.slowdown_radius},
        {"goal_radius", c.sfm.goal_radius},
        {"personal_margin", c.sfm.personal_margin},
        {"goal_min_distance", c.sfm.goal_min_distance},
        {"min_pace", c.sfm.min_pace}}},
      {"scenario",
       {{"human_radius", c.human_radius},
        {"robot_radius", c.robot_radius},
        {"dt_sim", c.dt_sim},
        {"bounds",
         {{"x_min", c.bounds.x_min}, {"y_min", c.bounds.y_min}, {"x_max", c.bounds.x_max}, {"y_max", c.bounds.y_max}}}}},
      {"robot_path",
       {{"waypoints", waypoints}, {"cruise_speed", c.robot_path.cruise_speed}, {"loop", c.robot_path.loop}}},
  };
}

json bench_to_json(const BenchConfig& c) {
  json specs = json::array();
  for (const auto& s : c.specs) specs.push_back(spec_to_json(s));
  return {{"seed", c.base_seed},
          {"output_dir", c.output_dir.string()},
          {"discovery", discovery_json(c.discovery)},
          {"te", te_json(c.te)},
          {"bench", {{"seeds", c.seeds}, {"methods", c.methods}, {"specs", specs}}}};
}

json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what(), 0);
  }
}

}  // namespace hricausal
