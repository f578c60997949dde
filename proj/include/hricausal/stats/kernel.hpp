#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "hricausal/stats/types.hpp"

namespace hricausal::stats {

/// RBF kernel ridge regression on a fixed set of regressors. The regressors
/// are standardized per column; the bandwidth is the median pairwise distance.
/// The factorization is reused for every target passed to residuals().
class KernelRidge {
 public:
  /// Requires at least one regressor and n >= 10. If the regularized kernel
  /// matrix is not positive definite the ridge is raised 10x, up to three
  /// times, before NumericalError is thrown.
  KernelRidge(std::span<const SeriesView> Z, const KernelRegParams& params);

  /// target - f(Z), with f fit on the centered target.
  Series residuals(SeriesView target) const;

  double bandwidth() const { return bandwidth_; }
  double ridge() const { return ridge_; }

 private:
  std::size_t n_;
  double bandwidth_ = 1.0;
  double ridge_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

Series kernel_ridge_residuals(SeriesView target, std::span<const SeriesView> Z,
                              const KernelRegParams& params);

/// Sample distance correlation in [0, 1]. Constant input gives 0.
double distance_correlation(SeriesView x, SeriesView y);

/// Permutation p-value of the distance correlation, (1 + #{perm >= obs}) / (1 + P).
double dcor_perm_test(SeriesView x, SeriesView y, const KernelRegParams& params,
                      std::uint64_t seed);

/// Nonlinear CI test: residualize x and y on Z by kernel ridge regression
/// (plain centering when Z is empty), then test the residuals' distance
/// correlation by permutation.
CITestResult kridge_dcor_test(SeriesView x, SeriesView y, std::span<const SeriesView> Z,
                              const KernelRegParams& params, std::uint64_t seed);

}  // namespace hricausal::stats
