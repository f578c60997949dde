#pragma once

#include <cstddef>
#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "hricausal/causal_model.hpp"
#include "hricausal/timeseries.hpp"

namespace hricausal::bench {

enum class LinkFunction { Linear, Tanh, Quadratic };

std::string_view to_string(LinkFunction link);
LinkFunction parse_link(std::string_view name);

/// One lagged structural term: target_t += coefficient * f(scale * source_{t-lag}).
struct SCMEdge {
  std::size_t source = 0;
  std::size_t target = 0;
  int lag = 1;
  double coefficient = 0.0;
  LinkFunction link = LinkFunction::Linear;
  double scale = 1.0;

  friend bool operator==(const SCMEdge&, const SCMEdge&) = default;
};

struct SCMSpec {
  std::string name = "scm";
  std::size_t n_vars = 0;
  std::vector<SCMEdge> edges;
  std::vector<double> noise_std;  ///< one per variable; empty means unit noise
  std::size_t n_samples = 500;
  std::uint64_t seed = 0;

  int max_lag() const;
  double noise_of(std::size_t var) const { return noise_std.empty() ? 1.0 : noise_std[var]; }
  void validate() const;
};

using EdgeSet = std::set<LaggedEdge>;

struct SCMSample {
  TimeSeriesBatch batch;  ///< "time" column first, then x0..x{n-1}
  EdgeSet truth;
};

inline constexpr std::size_t kBurnIn = 200;

/// Simulates the SCM with Gaussian noise, discarding kBurnIn leading steps.
/// Throws UnstableSpecError as soon as any |value| exceeds 1e6.
SCMSample generate(const SCMSpec& spec);

struct GraphScore {
  double precision = 1.0;
  double recall = 1.0;
  double f1 = 1.0;
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
};

/// Precision/recall/F1 over directed lagged edges, self-loops included.
/// Precision is 1 when nothing is predicted; F1 is 0 when both are 0.
GraphScore score(const CausalModel& estimated, const EdgeSet& truth);
GraphScore score(const EdgeSet& estimated, const EdgeSet& truth);

/// X->Y (0.8), X->X (0.6), Y->Z (0.7), all lag 1 and linear.
SCMSpec linear_chain_spec(std::uint64_t seed, std::size_t n_samples = 500);
/// X->Y linear single edge.
SCMSpec single_edge_spec(std::uint64_t seed, std::size_t n_samples = 500);
/// X->Y tanh (0.8, scale 2), X->Z quadratic, Y->W quadratic, all lag 1.
SCMSpec nonlinear_spec(std::uint64_t seed, std::size_t n_samples = 500);
/// Three coupled variables followed by three independent noise variables.
SCMSpec sparse_six_spec(std::uint64_t seed, std::size_t n_samples = 500);

}  // namespace hricausal::bench
