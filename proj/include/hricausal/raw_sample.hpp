#pragma once

#include "hricausal/state.hpp"

namespace hricausal {

/// Both agents' latest states latched at one sampling grid point.
struct RawSample {
  double t = 0.0;
  AgentState human;
  AgentState robot;
};

}  // namespace hricausal
