#include "hricausal/discovery/pcmci.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <spdlog/spdlog.h>

#include "hricausal/error.hpp"
#include "hricausal/stats/ci_test.hpp"
#include "hricausal/stats/transfer_entropy.hpp"

namespace hricausal::discovery {

namespace {

enum Phase : std::uint64_t { kPhasePC1 = 1, kPhaseMCI = 2, kPhaseTE = 3 };

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

double abs_stat(const ScoredParent& p) { return std::abs(p.statistic); }

void sort_by_strength(std::vector<ScoredParent>& v) {
  std::stable_sort(v.begin(), v.end(),
                   [](const ScoredParent& a, const ScoredParent& b) { return abs_stat(a) > abs_stat(b); });
}

stats::CITestResult safe_test(const DiscoveryParams& params, stats::SeriesView x,
                              stats::SeriesView y, const std::vector<stats::SeriesView>& z,
                              std::uint64_t seed) {
  try {
    return stats::run_ci_test(params.ci_test, x, y, z, params.kernel, seed, params.alpha);
  } catch (const std::exception& e) {
    spdlog::warn("CI test failed ({}); treating as independent", e.what());
    return {};
  }
}

}  // namespace

LaggedData::LaggedData(const TimeSeriesBatch& batch, int max_lag) : max_lag_(max_lag) {
  if (max_lag < 0) throw ValidationError("max_lag must be non-negative");
  const auto n = batch.n_samples();
  n_effective_ = n > static_cast<std::size_t>(max_lag) ? n - static_cast<std::size_t>(max_lag) : 0;
  for (std::size_t c = 0; c < batch.n_vars(); ++c) columns_.push_back(batch.column(c));
}

stats::SeriesView LaggedData::series(std::size_t var, int lag) const {
  if (var >= columns_.size()) throw ValidationError("lagged series: variable out of range");
  if (lag < 0 || lag > max_lag_) throw ValidationError("lagged series: lag out of range");
  const auto offset = static_cast<std::size_t>(max_lag_ - lag);
  return stats::SeriesView(columns_[var]).subspan(offset, n_effective_);
}

CandidateSets lagged_candidates(std::size_t n_vars, const DiscoveryParams& params) {
  params.validate();
  if (n_vars == 0) throw ValidationError("lagged_candidates: no variables");
  CandidateSets sets(n_vars);
  for (auto& set : sets) {
    for (std::size_t i = 0; i < n_vars; ++i) {
      for (int tau = params.tau_min; tau <= params.tau_max; ++tau) set.push_back({i, tau});
    }
  }
  return sets;
}

std::uint64_t test_seed(std::uint64_t base, const std::string& batch_id, std::uint64_t phase,
                        std::size_t source, int lag, std::size_t target, std::size_t depth) {
  std::uint64_t h = splitmix(base ^ fnv1a(batch_id));
  for (std::uint64_t v : {phase, static_cast<std::uint64_t>(source), static_cast<std::uint64_t>(lag),
                          static_cast<std::uint64_t>(target), static_cast<std::uint64_t>(depth)}) {
    h = splitmix(h ^ v);
  }
  return h;
}

std::vector<ScoredParent> pc1_condition_selection(const LaggedData& data, std::size_t target,
                                                  const std::vector<LaggedVariable>& candidates,
                                                  const DiscoveryParams& params,
                                                  const std::string& batch_id) {
  std::vector<ScoredParent> survivors;
  for (const auto& c : candidates) survivors.push_back({c, 0.0, 1.0});
  const auto y = data.present(target);
  const double pc_alpha = params.effective_pc_alpha();

  for (int depth = 0; depth <= params.max_conditions; ++depth) {
    if (survivors.size() <= static_cast<std::size_t>(depth)) break;
    // conditions come from the ranking of the previous iteration
    const std::vector<ScoredParent> ranking = survivors;
    std::vector<ScoredParent> kept;
    for (const auto& cand : ranking) {
      std::vector<stats::SeriesView> z;
      for (const auto& other : ranking) {
        if (static_cast<int>(z.size()) == depth) break;
        if (other.parent == cand.parent) continue;
        z.push_back(data.series(other.parent.var, other.parent.lag));
      }
      const auto seed = test_seed(params.seed, batch_id, kPhasePC1, cand.parent.var,
                                  cand.parent.lag, target, static_cast<std::size_t>(depth));
      const auto res = safe_test(params, data.series(cand.parent.var, cand.parent.lag), y, z, seed);
      if (res.p_value <= pc_alpha) kept.push_back({cand.parent, res.statistic, res.p_value});
    }
    survivors = std::move(kept);
    sort_by_strength(survivors);
  }
  return survivors;
}

MCIResult mci_tests(const LaggedData& data, const ParentSets& parents,
                    const CandidateSets& candidates, const DiscoveryParams& params,
                    const std::string& batch_id) {
  const auto n_vars = data.n_vars();
  const auto n_lags = static_cast<std::size_t>(params.n_lags());
  MCIResult out{Tensor3<double>(n_lags, n_vars, 0.0), Tensor3<double>(n_lags, n_vars, 1.0)};
  const auto limit = static_cast<std::size_t>(params.max_conditions);

  for (std::size_t j = 0; j < n_vars; ++j) {
    for (const auto& link : candidates[j]) {
      std::vector<LaggedVariable> conds;
      for (const auto& p : parents[j]) {
        if (conds.size() == limit) break;
        if (p.parent != link) conds.push_back(p.parent);
      }
      std::size_t from_source = 0;
      for (const auto& p : parents[link.var]) {
        if (from_source == limit) break;
        LaggedVariable shifted{p.parent.var, p.parent.lag + link.lag};
        if (shifted.lag > data.max_lag()) continue;
        ++from_source;
        if (shifted != link && std::find(conds.begin(), conds.end(), shifted) == conds.end()) {
          conds.push_back(shifted);
        }
      }
      std::vector<stats::SeriesView> z;
      for (const auto& c : conds) z.push_back(data.series(c.var, c.lag));
      const auto seed = test_seed(params.seed, batch_id, kPhaseMCI, link.var, link.lag, j, 0);
      const auto res = safe_test(params, data.series(link.var, link.lag), data.present(j), z, seed);
      const auto l = static_cast<std::size_t>(link.lag - params.tau_min);
      out.val(l, link.var, j) = res.statistic;
      out.pval(l, link.var, j) = res.p_value;
    }
  }
  return out;
}

std::size_t minimum_rows(const DiscoveryParams& params) {
  return 10 * static_cast<std::size_t>(params.max_conditions + 2);
}

CausalModel pcmci(const TimeSeriesBatch& batch, const DiscoveryParams& params,
                  const std::string& batch_id, const CandidateSets* candidates) {
  params.validate();
  const TimeSeriesBatch view = analysis_view(batch);
  view.validate();
  const auto n_vars = view.n_vars();

  // Source parents are shifted by up to tau_max, so every test shares the
  // 2*tau_max cut-off.
  const int max_lag = 2 * params.tau_max;
  const LaggedData data(view, max_lag);
  if (data.n_effective() < minimum_rows(params)) {
    throw BatchTooShortError("batch too short: " + std::to_string(data.n_effective()) +
                             " usable rows, need " + std::to_string(minimum_rows(params)));
  }

  const CandidateSets all = lagged_candidates(n_vars, params);
  const CandidateSets& cands = candidates ? *candidates : all;
  if (cands.size() != n_vars) throw ValidationError("candidate sets do not match variable count");
  for (const auto& set : cands) {
    for (const auto& c : set) {
      if (c.var >= n_vars || c.lag < params.tau_min || c.lag > params.tau_max) {
        throw ValidationError("candidate outside the variable/lag range");
      }
    }
  }

  ParentSets parents(n_vars);
  for (std::size_t j = 0; j < n_vars; ++j) {
    parents[j] = pc1_condition_selection(data, j, cands[j], params, batch_id);
  }
  const MCIResult mci = mci_tests(data, parents, cands, params, batch_id);

  CausalModel model;
  model.variable_names = view.variable_names;
  model.tau_min = params.tau_min;
  model.tau_max = params.tau_max;
  model.params_used = params;
  model.method = DiscoveryMethod::PCMCI;
  model.batch_id = batch_id;
  const auto n_lags = static_cast<std::size_t>(params.n_lags());
  model.causal_structure = Tensor3<int>(n_lags, n_vars, 0);
  model.val_matrix = Tensor3<double>(n_lags, n_vars, 0.0);
  model.pval_matrix = Tensor3<double>(n_lags, n_vars, 0.0);
  for (std::size_t l = 0; l < n_lags; ++l) {
    for (std::size_t i = 0; i < n_vars; ++i) {
      for (std::size_t j = 0; j < n_vars; ++j) {
        const double p = mci.pval(l, i, j);
        const double v = mci.val(l, i, j);
        if (p <= params.alpha && v != 0.0) {
          model.causal_structure(l, i, j) = 1;
          model.val_matrix(l, i, j) = v;
          // keep present links distinguishable from masked entries
          model.pval_matrix(l, i, j) = std::max(p, std::numeric_limits<double>::min());
        }
      }
    }
  }
  return model;
}

CausalModel fpcmci(const TimeSeriesBatch& batch, const DiscoveryParams& params,
                   const stats::TEParams& te_params, const std::string& batch_id) {
  params.validate();
  te_params.validate();
  const TimeSeriesBatch view = analysis_view(batch);
  view.validate();
  const auto n_vars = view.n_vars();

  std::vector<std::vector<double>> cols;
  for (std::size_t c = 0; c < n_vars; ++c) cols.push_back(view.column(c));

  CandidateSets cands(n_vars);
  std::vector<TEFilterDecision> decisions;
  for (std::size_t j = 0; j < n_vars; ++j) {
    for (int tau = params.tau_min; tau <= params.tau_max; ++tau) cands[j].push_back({j, tau});
  }
  std::size_t kept_pairs = 0;
  for (std::size_t i = 0; i < n_vars; ++i) {
    for (std::size_t j = 0; j < n_vars; ++j) {
      if (i == j) continue;
      const auto seed = test_seed(params.seed, batch_id, kPhaseTE, i, 0, j, 0);
      const auto sig = stats::te_significance(cols[i], cols[j], te_params, seed);
      decisions.push_back({i, j, sig.te, sig.threshold, sig.significant});
      if (!sig.significant) continue;
      ++kept_pairs;
      for (int tau = params.tau_min; tau <= params.tau_max; ++tau) cands[j].push_back({i, tau});
    }
  }
  for (auto& set : cands) std::sort(set.begin(), set.end());
  if (kept_pairs == 0 && n_vars > 1) {
    spdlog::info("fpcmci: transfer-entropy filter removed every cross pair; testing self-lags only");
  }

  CausalModel model = pcmci(batch, params, batch_id, &cands);
  model.method = DiscoveryMethod::FPCMCI;
  model.te_params = te_params;
  model.te_filter = std::move(decisions);
  return model;
}

CausalModel run_discovery(DiscoveryMethod method, const TimeSeriesBatch& batch,
                          const DiscoveryParams& params, const stats::TEParams& te_params,
                          const std::string& batch_id) {
  return method == DiscoveryMethod::PCMCI ? pcmci(batch, params, batch_id)
                                          : fpcmci(batch, params, te_params, batch_id);
}

}  // namespace hricausal::discovery
