#pragma once

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hricausal/raw_sample.hpp"
#include "hricausal/timeseries.hpp"

namespace hricausal {

/// Parameters of the collision-risk proxy.
struct RiskParams {
  double margin = 0.3;        ///< added to both body radii (enlarged encumbrance), m
  double decay_length = 2.0;  ///< exponential attenuation length, m
  double epsilon = 0.05;      ///< minimum surface gap used in the denominator, m

  void validate() const;
};

/// Planar speed of the human, m/s.
double human_speed(const AgentState& human);

/// Distance from the human to its goal, m.
double goal_distance(const AgentState& human);

/// Collision risk of the human with respect to the robot, 1/s.
///
///   d = |p_r - p_h|, R = r_r + r_h + margin, u = (p_r - p_h) / d
///   risk = max(0, v_h . u) * exp(-max(0, d - R) / decay) / max(d - R, epsilon)
///
/// i.e. the closing speed over the surface gap, attenuated with distance.
/// Coincident agents (d <= epsilon) are clamped and logged; use
/// `risk_precondition_holds` to reject them instead.
double collision_risk(const AgentState& human, const AgentState& robot, const RiskParams& params);

/// True when the agents are further apart than `params.epsilon`.
bool risk_precondition_holds(const AgentState& human, const AgentState& robot,
                             const RiskParams& params);

/// Column names produced by `postprocess_batch`.
inline const std::vector<std::string>& hri_columns() {
  static const std::vector<std::string> cols{"time", "h_v", "h_dg", "h_risk"};
  return cols;
}

/// Maps raw samples to rows (time, h_v, h_dg, h_risk). Throws ValidationError
/// on an empty input or on any sample violating the risk precondition.
TimeSeriesBatch postprocess_batch(std::span<const RawSample> samples, const RiskParams& params,
                                  double dt);

/// A named transform from raw samples to an analysable batch.
using Postprocessor = std::function<TimeSeriesBatch(std::span<const RawSample>, double dt)>;
using PostprocessorFactory = std::function<Postprocessor(const RiskParams&)>;

/// Looks up a registered postprocessor ("hri_basic", "identity", or one added
/// through register_postprocessor). Throws ValidationError for unknown names.
Postprocessor make_postprocessor(std::string_view name, const RiskParams& risk = {});

void register_postprocessor(std::string name, PostprocessorFactory factory);

std::vector<std::string> postprocessor_names();

}  // namespace hricausal
