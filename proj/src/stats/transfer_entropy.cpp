#include "hricausal/stats/transfer_entropy.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_map>

#include "hricausal/error.hpp"
#include "hricausal/stats/parcorr.hpp"

namespace hricausal::stats {

namespace {

std::vector<int> discretize(SeriesView x, int bins) {
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  const double width = (*hi - *lo) / bins;
  std::vector<int> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    int b = width > 0.0 ? static_cast<int>((x[i] - *lo) / width) : 0;
    out[i] = std::clamp(b, 0, bins - 1);
  }
  return out;
}

/// Encodes `history` consecutive symbols ending at t-1.
std::uint64_t past_code(const std::vector<int>& s, std::size_t t, int history, int bins) {
  std::uint64_t code = 0;
  for (int h = 1; h <= history; ++h) code = code * static_cast<std::uint64_t>(bins) + s[t - h];
  return code;
}

double te_from_symbols(const std::vector<int>& src, const std::vector<int>& dst, int history,
                       int bins) {
  const std::size_t n = dst.size();
  const auto k = static_cast<std::size_t>(history);
  std::uint64_t past_states = 1;
  for (int h = 0; h < history; ++h) past_states *= static_cast<std::uint64_t>(bins);

  std::unordered_map<std::uint64_t, double> joint, yp_xp, y_yp, yp;
  for (std::size_t t = k; t < n; ++t) {
    const std::uint64_t y = static_cast<std::uint64_t>(dst[t]);
    const std::uint64_t ypast = past_code(dst, t, history, bins);
    const std::uint64_t xpast = past_code(src, t, history, bins);
    joint[(y * past_states + ypast) * past_states + xpast] += 1.0;
    yp_xp[ypast * past_states + xpast] += 1.0;
    y_yp[y * past_states + ypast] += 1.0;
    yp[ypast] += 1.0;
  }
  const double total = static_cast<double>(n - k);
  double te = 0.0;
  for (const auto& [code, c] : joint) {
    const std::uint64_t xpast = code % past_states;
    const std::uint64_t ypast = (code / past_states) % past_states;
    const std::uint64_t y = code / past_states / past_states;
    te += c * std::log(c * yp.at(ypast) / (yp_xp.at(ypast * past_states + xpast) *
                                          y_yp.at(y * past_states + ypast)));
  }
  return std::max(0.0, te / total);
}

void check_inputs(SeriesView src, SeriesView dst, const TEParams& p) {
  p.validate();
  if (src.size() != dst.size()) throw ValidationError("transfer_entropy: length mismatch");
  if (src.size() < 50) throw ValidationError("transfer_entropy: need at least 50 samples");
  if (src.size() <= static_cast<std::size_t>(2 * p.history + 1)) {
    throw ValidationError("transfer_entropy: history too long for the series");
  }
}

}  // namespace

double transfer_entropy(SeriesView src, SeriesView dst, const TEParams& params) {
  check_inputs(src, dst, params);
  if (is_constant(src) || is_constant(dst)) return 0.0;
  return te_from_symbols(discretize(src, params.bins), discretize(dst, params.bins),
                         params.history, params.bins);
}

TESignificance te_significance(SeriesView src, SeriesView dst, const TEParams& params,
                               std::uint64_t seed) {
  check_inputs(src, dst, params);
  TESignificance out;
  if (is_constant(src) || is_constant(dst)) return out;

  const auto xs = discretize(src, params.bins);
  const auto ys = discretize(dst, params.bins);
  out.te = te_from_symbols(xs, ys, params.history, params.bins);

  // Circular shifts keep the source's own autocorrelation but break its
  // alignment with the target; short shifts are excluded.
  const std::size_t n = xs.size();
  const std::size_t min_shift = std::max<std::size_t>(params.history + 1, n / 10);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> shift_dist(min_shift, n - min_shift);
  std::vector<double> null;
  null.reserve(static_cast<std::size_t>(params.shuffles));
  std::vector<int> shifted(n);
  for (int s = 0; s < params.shuffles; ++s) {
    const std::size_t shift = shift_dist(rng);
    for (std::size_t i = 0; i < n; ++i) shifted[i] = xs[(i + shift) % n];
    null.push_back(te_from_symbols(shifted, ys, params.history, params.bins));
  }
  std::sort(null.begin(), null.end());
  // linear interpolation between order statistics
  const double pos = params.quantile * static_cast<double>(null.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, null.size() - 1);
  out.threshold = null[lo] + (pos - static_cast<double>(lo)) * (null[hi] - null[lo]);
  out.significant = out.te > out.threshold;
  return out;
}

}  // namespace hricausal::stats
