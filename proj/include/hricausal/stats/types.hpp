#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace hricausal::stats {

using Series = std::vector<double>;
using SeriesView = std::span<const double>;

/// Outcome of one conditional-independence query X _||_ Y | Z.
struct CITestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t n_effective = 0;
  bool dependent = false;  ///< p_value <= alpha; set by the caller that knows alpha
};

enum class CITestKind { ParCorr, KRidgeDcor };

std::string_view to_string(CITestKind kind);
/// Accepts "parcorr" and "kridge-dcor" (also "kridge_dcor").
CITestKind parse_ci_test(std::string_view name);

/// Settings of the kernel-ridge + distance-correlation test.
struct KernelRegParams {
  double ridge = 1e-3;
  int permutations = 200;

  void validate() const;
  friend bool operator==(const KernelRegParams&, const KernelRegParams&) = default;
};

/// Settings of the binned transfer-entropy estimator and its surrogate test.
struct TEParams {
  int history = 1;
  int bins = 8;
  int shuffles = 100;
  double quantile = 0.95;

  void validate() const;
  friend bool operator==(const TEParams&, const TEParams&) = default;
};

}  // namespace hricausal::stats
