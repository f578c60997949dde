#include "hricausal/causal_model.hpp"

#include <cmath>
#include <sstream>

#include "hricausal/error.hpp"

namespace hricausal {

std::string_view to_string(DiscoveryMethod method) {
  return method == DiscoveryMethod::PCMCI ? "pcmci" : "fpcmci";
}

DiscoveryMethod parse_method(std::string_view name) {
  if (name == "pcmci") return DiscoveryMethod::PCMCI;
  if (name == "fpcmci") return DiscoveryMethod::FPCMCI;
  throw ValidationError("unknown discovery method '" + std::string(name) + "' (pcmci|fpcmci)");
}

void DiscoveryParams::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("alpha must lie in (0, 1)");
  if (tau_min < 1) throw ValidationError("tau_min must be >= 1");
  if (tau_max < tau_min) throw ValidationError("tau_max must be >= tau_min");
  if (max_conditions < 0) throw ValidationError("max_conditions must be >= 0");
  if (pc_alpha && !(*pc_alpha > 0.0 && *pc_alpha < 1.0)) {
    throw ValidationError("pc_alpha must lie in (0, 1)");
  }
  kernel.validate();
}

std::vector<LaggedEdge> edges_of(const CausalModel& model) {
  std::vector<LaggedEdge> edges;
  for (std::size_t i = 0; i < model.n_vars(); ++i) {
    for (std::size_t j = 0; j < model.n_vars(); ++j) {
      for (std::size_t l = 0; l < model.n_lags(); ++l) {
        if (model.causal_structure(l, i, j) == 1) {
          edges.push_back({i, j, model.tau_min + static_cast<int>(l)});
        }
      }
    }
  }
  return edges;
}

std::string check_model(const CausalModel& m) {
  if (m.tau_min < 1 || m.tau_max < m.tau_min) return "invalid lag range";
  const auto lags = m.n_lags();
  const auto vars = m.n_vars();
  for (const auto* shape : {&m.val_matrix, &m.pval_matrix}) {
    if (shape->n_lags() != lags || shape->n_vars() != vars) return "tensor shape mismatch";
  }
  if (m.causal_structure.n_lags() != lags || m.causal_structure.n_vars() != vars) {
    return "structure shape mismatch";
  }
  for (std::size_t l = 0; l < lags; ++l) {
    for (std::size_t i = 0; i < vars; ++i) {
      for (std::size_t j = 0; j < vars; ++j) {
        const int s = m.causal_structure(l, i, j);
        const double v = m.val_matrix(l, i, j);
        const double p = m.pval_matrix(l, i, j);
        std::ostringstream where;
        where << "[" << l << "][" << i << "][" << j << "]";
        if (s != 0 && s != 1) return "non-binary structure at " + where.str();
        if (!std::isfinite(v) || !std::isfinite(p)) return "non-finite entry at " + where.str();
        if (p < 0.0 || p > 1.0) return "p-value outside [0,1] at " + where.str();
        if ((v != 0.0) != (s == 1)) return "val/structure mismatch at " + where.str();
        if ((p > 0.0) != (s == 1)) return "pval/structure mismatch at " + where.str();
        if (s == 1 && p > m.params_used.alpha) return "link above alpha at " + where.str();
      }
    }
  }
  return {};
}

}  // namespace hricausal
