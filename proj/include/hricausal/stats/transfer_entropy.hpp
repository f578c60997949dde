#pragma once

#include <cstdint>

#include "hricausal/stats/types.hpp"

namespace hricausal::stats {

/// Plug-in estimate of I(dst_t ; src_{t-1..t-k} | dst_{t-1..t-k}) in nats,
/// with every series discretized into `bins` equal-width bins. Never negative;
/// 0 for constant input.
double transfer_entropy(SeriesView src, SeriesView dst, const TEParams& params);

struct TESignificance {
  double te = 0.0;
  double threshold = 0.0;
  bool significant = false;
};

/// Compares the TE against the `quantile` of TE values obtained from
/// circularly shifted copies of `src`.
TESignificance te_significance(SeriesView src, SeriesView dst, const TEParams& params,
                               std::uint64_t seed);

}  // namespace hricausal::stats
