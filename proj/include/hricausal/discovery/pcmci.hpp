#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "hricausal/causal_model.hpp"
#include "hricausal/stats/types.hpp"
#include "hricausal/timeseries.hpp"

namespace hricausal::discovery {

/// Variable `var` observed `lag` steps before the current time.
struct LaggedVariable {
  std::size_t var = 0;
  int lag = 1;

  friend auto operator<=>(const LaggedVariable&, const LaggedVariable&) = default;
};

/// Candidate parents, one list per target variable.
using CandidateSets = std::vector<std::vector<LaggedVariable>>;

struct ScoredParent {
  LaggedVariable parent;
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Parents of each target, strongest (largest |statistic|) first.
using ParentSets = std::vector<std::vector<ScoredParent>>;

/// Lag-aligned view of a batch. Every series has n - max_lag samples; entry k
/// of series(var, lag) is the value of `var` at time max_lag + k - lag.
class LaggedData {
 public:
  LaggedData(const TimeSeriesBatch& batch, int max_lag);

  stats::SeriesView series(std::size_t var, int lag) const;
  stats::SeriesView present(std::size_t var) const { return series(var, 0); }
  std::size_t n_effective() const { return n_effective_; }
  std::size_t n_vars() const { return columns_.size(); }
  int max_lag() const { return max_lag_; }

 private:
  std::vector<std::vector<double>> columns_;
  std::size_t n_effective_ = 0;
  int max_lag_ = 0;
};

/// Every (var, lag) with lag in [tau_min, tau_max], self-lags included, for
/// every target.
CandidateSets lagged_candidates(std::size_t n_vars, const DiscoveryParams& params);

/// Deterministic seed for one CI test, independent of evaluation order.
std::uint64_t test_seed(std::uint64_t base, const std::string& batch_id, std::uint64_t phase,
                        std::size_t source, int lag, std::size_t target, std::size_t depth);

/// Parent pre-selection for one target. Conditions on the p strongest other
/// survivors for p = 0..max_conditions and drops candidates whose p-value
/// exceeds pc_alpha. Returns survivors with their last statistics, strongest
/// first.
std::vector<ScoredParent> pc1_condition_selection(const LaggedData& data, std::size_t target,
                                                  const std::vector<LaggedVariable>& candidates,
                                                  const DiscoveryParams& params,
                                                  const std::string& batch_id = {});

struct MCIResult {
  Tensor3<double> val;
  Tensor3<double> pval;
};

/// Momentary conditional independence tests for every candidate link,
/// conditioning on the target's parents and the source's parents shifted by
/// the link lag (each truncated to max_conditions). Links outside the
/// candidate sets get val 0, pval 1.
MCIResult mci_tests(const LaggedData& data, const ParentSets& parents,
                    const CandidateSets& candidates, const DiscoveryParams& params,
                    const std::string& batch_id = {});

/// Minimum rows required by pcmci for the given parameters.
std::size_t minimum_rows(const DiscoveryParams& params);

/// PCMCI over the batch's non-time columns. `candidates` restricts the link
/// search (all lagged pairs when null). Throws BatchTooShortError when the
/// lag-aligned batch is shorter than minimum_rows().
CausalModel pcmci(const TimeSeriesBatch& batch, const DiscoveryParams& params,
                  const std::string& batch_id = {}, const CandidateSets* candidates = nullptr);

/// Transfer-entropy filtered PCMCI: cross links are only tested for pairs
/// whose TE beats the surrogate threshold; self-lags are always kept.
CausalModel fpcmci(const TimeSeriesBatch& batch, const DiscoveryParams& params,
                   const stats::TEParams& te_params, const std::string& batch_id = {});

CausalModel run_discovery(DiscoveryMethod method, const TimeSeriesBatch& batch,
                          const DiscoveryParams& params, const stats::TEParams& te_params,
                          const std::string& batch_id = {});

}  // namespace hricausal::discovery
