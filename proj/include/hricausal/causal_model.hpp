#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hricausal/stats/types.hpp"
#include "hricausal/tensor.hpp"

namespace hricausal {

inline constexpr std::string_view kCausalModelTopic = "/roscausal/causal_model";

enum class DiscoveryMethod { PCMCI, FPCMCI };

std::string_view to_string(DiscoveryMethod method);
DiscoveryMethod parse_method(std::string_view name);

struct DiscoveryParams {
  double alpha = 0.05;
  int tau_min = 1;
  int tau_max = 1;
  stats::CITestKind ci_test = stats::CITestKind::ParCorr;
  int max_conditions = 3;
  std::optional<double> pc_alpha;  ///< defaults to alpha when unset
  std::uint64_t seed = 0;
  stats::KernelRegParams kernel;

  double effective_pc_alpha() const { return pc_alpha.value_or(alpha); }
  int n_lags() const { return tau_max - tau_min + 1; }
  void validate() const;
  friend bool operator==(const DiscoveryParams&, const DiscoveryParams&) = default;
};

/// Verdict of the transfer-entropy filter for one ordered variable pair.
struct TEFilterDecision {
  std::size_t source = 0;
  std::size_t target = 0;
  double te = 0.0;
  double threshold = 0.0;
  bool kept = false;

  friend bool operator==(const TEFilterDecision&, const TEFilterDecision&) = default;
};

/// Discovered lagged causal graph. All tensors are indexed [lag][source][target]
/// where lag index l stands for tau = tau_min + l.
struct CausalModel {
  std::vector<std::string> variable_names;
  int tau_min = 1;
  int tau_max = 1;
  Tensor3<int> causal_structure;
  Tensor3<double> val_matrix;
  Tensor3<double> pval_matrix;
  DiscoveryParams params_used;
  DiscoveryMethod method = DiscoveryMethod::PCMCI;
  std::optional<stats::TEParams> te_params;
  std::vector<TEFilterDecision> te_filter;
  std::string batch_id;

  std::size_t n_vars() const { return variable_names.size(); }
  std::size_t n_lags() const { return static_cast<std::size_t>(tau_max - tau_min + 1); }

  friend bool operator==(const CausalModel&, const CausalModel&) = default;
};

struct LaggedEdge {
  std::size_t source = 0;
  std::size_t target = 0;
  int lag = 1;

  friend auto operator<=>(const LaggedEdge&, const LaggedEdge&) = default;
};

/// Edges with causal_structure == 1, ordered by (source, target, lag).
std::vector<LaggedEdge> edges_of(const CausalModel& model);

/// Checks the shape contract and the masking invariant: val and pval are
/// non-zero exactly where the structure is 1, and every present link has
/// pval <= alpha. Returns an empty string when the model is consistent,
/// otherwise a description of the first violation.
std::string check_model(const CausalModel& model);

}  // namespace hricausal
