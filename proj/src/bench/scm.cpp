#include "hricausal/bench/scm.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "hricausal/error.hpp"

namespace hricausal::bench {

std::string_view to_string(LinkFunction link) {
  switch (link) {
    case LinkFunction::Linear: return "linear";
    case LinkFunction::Tanh: return "tanh";
    case LinkFunction::Quadratic: return "quadratic";
  }
  return "linear";
}

LinkFunction parse_link(std::string_view name) {
  if (name == "linear") return LinkFunction::Linear;
  if (name == "tanh") return LinkFunction::Tanh;
  if (name == "quadratic") return LinkFunction::Quadratic;
  throw ValidationError("unknown link function '" + std::string(name) + "'");
}

int SCMSpec::max_lag() const {
  int m = 0;
  for (const auto& e : edges) m = std::max(m, e.lag);
  return m;
}

void SCMSpec::validate() const {
  if (n_vars == 0) throw ValidationError("scm: n_vars must be positive");
  if (n_samples == 0) throw ValidationError("scm: n_samples must be positive");
  if (!noise_std.empty() && noise_std.size() != n_vars) {
    throw ValidationError("scm: noise_std needs one entry per variable");
  }
  for (double s : noise_std) {
    if (!(s >= 0.0) || !std::isfinite(s)) throw ValidationError("scm: noise_std must be finite and >= 0");
  }
  for (const auto& e : edges) {
    if (e.source >= n_vars || e.target >= n_vars) throw ValidationError("scm: edge endpoint out of range");
    if (e.lag < 1) throw ValidationError("scm: edge lags must be >= 1");
    if (!std::isfinite(e.coefficient) || !std::isfinite(e.scale)) {
      throw ValidationError("scm: edge coefficients must be finite");
    }
  }
}

namespace {

double apply(LinkFunction link, double x) {
  switch (link) {
    case LinkFunction::Linear: return x;
    case LinkFunction::Tanh: return std::tanh(x);
    case LinkFunction::Quadratic: return x * x;
  }
  return x;
}

}  // namespace

SCMSample generate(const SCMSpec& spec) {
  spec.validate();
  const std::size_t n = spec.n_vars;
  const std::size_t lag = static_cast<std::size_t>(spec.max_lag());
  const std::size_t total = lag + kBurnIn + spec.n_samples;

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<std::vector<double>> x(total, std::vector<double>(n, 0.0));
  for (std::size_t t = 0; t < total; ++t) {
    for (std::size_t j = 0; j < n; ++j) x[t][j] = spec.noise_of(j) * normal(rng);
    if (t < lag) continue;
    for (const auto& e : spec.edges) {
      const double src = x[t - static_cast<std::size_t>(e.lag)][e.source];
      x[t][e.target] += e.coefficient * apply(e.link, e.scale * src);
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (!(std::abs(x[t][j]) <= 1e6)) {
        throw UnstableSpecError("scm '" + spec.name + "' diverged at step " + std::to_string(t));
      }
    }
  }

  SCMSample out;
  out.batch.variable_names.emplace_back(kTimeColumn);
  for (std::size_t j = 0; j < n; ++j) out.batch.variable_names.push_back("x" + std::to_string(j));
  out.batch.t0 = 0.0;
  out.batch.dt = 1.0;
  out.batch.rows.reserve(spec.n_samples);
  for (std::size_t k = 0; k < spec.n_samples; ++k) {
    std::vector<double> row;
    row.reserve(n + 1);
    row.push_back(static_cast<double>(k));
    const auto& src = x[lag + kBurnIn + k];
    row.insert(row.end(), src.begin(), src.end());
    out.batch.rows.push_back(std::move(row));
  }
  for (const auto& e : spec.edges) {
    if (e.coefficient != 0.0) out.truth.insert({e.source, e.target, e.lag});
  }
  return out;
}

GraphScore score(const EdgeSet& estimated, const EdgeSet& truth) {
  GraphScore s;
  for (const auto& e : estimated) {
    if (truth.count(e)) ++s.true_positives;
    else ++s.false_positives;
  }
  s.false_negatives = truth.size() - s.true_positives;
  s.precision = estimated.empty() ? 1.0 : double(s.true_positives) / double(estimated.size());
  s.recall = truth.empty() ? 1.0 : double(s.true_positives) / double(truth.size());
  s.f1 = (s.precision + s.recall) > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
  return s;
}

GraphScore score(const CausalModel& estimated, const EdgeSet& truth) {
  const auto msg = check_model(estimated);
  if (!msg.empty()) throw ValidationError("score: " + msg);
  for (const auto& e : truth) {
    if (e.source >= estimated.n_vars() || e.target >= estimated.n_vars()) {
      throw ValidationError("score: truth refers to a variable the model does not have");
    }
    if (e.lag < estimated.tau_min || e.lag > estimated.tau_max) {
      throw ValidationError("score: truth lag outside the model's lag range");
    }
  }
  const auto edges = edges_of(estimated);
  return score(EdgeSet(edges.begin(), edges.end()), truth);
}

SCMSpec linear_chain_spec(std::uint64_t seed, std::size_t n_samples) {
  SCMSpec s;
  s.name = "linear_chain";
  s.n_vars = 3;
  s.edges = {{0, 1, 1, 0.8, LinkFunction::Linear, 1.0},
             {0, 0, 1, 0.6, LinkFunction::Linear, 1.0},
             {1, 2, 1, 0.7, LinkFunction::Linear, 1.0}};
  s.n_samples = n_samples;
  s.seed = seed;
  return s;
}

SCMSpec single_edge_spec(std::uint64_t seed, std::size_t n_samples) {
  SCMSpec s;
  s.name = "single_edge";
  s.n_vars = 2;
  s.edges = {{0, 1, 1, 0.8, LinkFunction::Linear, 1.0}};
  s.n_samples = n_samples;
  s.seed = seed;
  return s;
}

SCMSpec nonlinear_spec(std::uint64_t seed, std::size_t n_samples) {
  SCMSpec s;
  s.name = "nonlinear";
  s.n_vars = 4;
  s.edges = {{0, 1, 1, 0.8, LinkFunction::Tanh, 2.0},
             {0, 2, 1, 0.8, LinkFunction::Quadratic, 1.0},
             {1, 3, 1, 0.8, LinkFunction::Quadratic, 1.0}};
  s.n_samples = n_samples;
  s.seed = seed;
  return s;
}

SCMSpec sparse_six_spec(std::uint64_t seed, std::size_t n_samples) {
  SCMSpec s;
  s.name = "sparse_six";
  s.n_vars = 6;
  s.edges = {{0, 0, 1, 0.5, LinkFunction::Linear, 1.0},
             {0, 1, 1, 0.7, LinkFunction::Linear, 1.0},
             {1, 2, 1, 0.6, LinkFunction::Linear, 1.0}};
  s.n_samples = n_samples;
  s.seed = seed;
  return s;
}

}  // namespace hricausal::bench
