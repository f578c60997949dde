#pragma once

#include <span>

#include "hricausal/stats/types.hpp"

namespace hricausal::stats {

/// Sample Pearson correlation. Returns 0 when either series has zero variance.
double pearson(SeriesView x, SeriesView y);

/// Residuals of the least-squares fit of `target` on the columns of `Z` plus an
/// intercept. Linearly dependent columns are dropped (and logged).
Series residualize_linear(SeriesView target, std::span<const SeriesView> Z);

/// Partial-correlation test. The statistic is the Pearson correlation of the
/// linear residuals; the p-value is two-sided against Student-t with
/// n - |Z| - 2 degrees of freedom.
CITestResult parcorr_test(SeriesView x, SeriesView y, std::span<const SeriesView> Z);

/// True when the series is constant up to rounding.
bool is_constant(SeriesView x);

}  // namespace hricausal::stats
