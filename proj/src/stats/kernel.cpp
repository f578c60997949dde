#include "hricausal/stats/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <spdlog/spdlog.h>

#include "hricausal/error.hpp"
#include "hricausal/stats/parcorr.hpp"

namespace hricausal::stats {

namespace {

/// Row-major n x n double-centered distance matrix of a scalar series.
std::vector<double> centered_distances(SeriesView x) {
  const std::size_t n = x.size();
  std::vector<double> a(n * n);
  std::vector<double> row_mean(n, 0.0);
  double grand = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double d = std::abs(x[i] - x[j]);
      a[i * n + j] = d;
      row_mean[i] += d;
    }
    grand += row_mean[i];
    row_mean[i] /= static_cast<double>(n);
  }
  grand /= static_cast<double>(n * n);
  // symmetric, so column means equal row means
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i * n + j] += grand - row_mean[i] - row_mean[j];
  }
  return a;
}

double mean_product(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s / static_cast<double>(a.size());
}

double dcor_from(double dcov2, double dvar_x, double dvar_y) {
  const double denom = std::sqrt(dvar_x * dvar_y);
  if (!(denom > 1e-300)) return 0.0;
  return std::sqrt(std::clamp(dcov2 / denom, 0.0, 1.0));
}

Series centered(SeriesView x) {
  Series out(x.begin(), x.end());
  const double m = std::accumulate(out.begin(), out.end(), 0.0) / static_cast<double>(out.size());
  for (double& v : out) v -= m;
  return out;
}

double rms(SeriesView x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return x.empty() ? 0.0 : std::sqrt(s / static_cast<double>(x.size()));
}

}  // namespace

KernelRidge::KernelRidge(std::span<const SeriesView> Z, const KernelRegParams& params)
    : n_(Z.empty() ? 0 : Z.front().size()), ridge_(params.ridge) {
  if (Z.empty()) throw ValidationError("kernel ridge needs at least one regressor");
  if (n_ < 10) throw ValidationError("kernel ridge needs at least 10 samples");
  params.validate();
  for (const auto& z : Z) {
    if (z.size() != n_) throw ValidationError("kernel ridge: regressor length mismatch");
  }

  const auto n = static_cast<Eigen::Index>(n_);
  Eigen::MatrixXd feats(n, static_cast<Eigen::Index>(Z.size()));
  for (std::size_t c = 0; c < Z.size(); ++c) {
    const Series zc = centered(Z[c]);
    const double sd = rms(zc);
    for (Eigen::Index r = 0; r < n; ++r) {
      feats(r, static_cast<Eigen::Index>(c)) = sd > 0.0 && !is_constant(Z[c]) ? zc[r] / sd : 0.0;
    }
  }

  Eigen::MatrixXd sq(n, n);
  std::vector<double> dists;
  dists.reserve(n_ * (n_ - 1) / 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    sq(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d2 = (feats.row(i) - feats.row(j)).squaredNorm();
      sq(i, j) = d2;
      sq(j, i) = d2;
      dists.push_back(d2);
    }
  }
  const auto mid = dists.begin() + static_cast<std::ptrdiff_t>(dists.size() / 2);
  std::nth_element(dists.begin(), mid, dists.end());
  const double median = std::sqrt(*mid);
  bandwidth_ = median > 1e-12 ? median : 1.0;

  const Eigen::MatrixXd gram = (-sq / (2.0 * bandwidth_ * bandwidth_)).array().exp().matrix();
  for (int attempt = 0; attempt <= 3; ++attempt) {
    Eigen::MatrixXd reg = gram;
    reg.diagonal().array() += ridge_;
    llt_.compute(reg);
    if (llt_.info() == Eigen::Success) return;
    if (attempt < 3) {
      spdlog::debug("kernel ridge: system not positive definite, raising ridge to {}", ridge_ * 10);
      ridge_ *= 10.0;
    }
  }
  throw NumericalError("kernel ridge: singular kernel system");
}

Series KernelRidge::residuals(SeriesView target) const {
  if (target.size() != n_) throw ValidationError("kernel ridge: target length mismatch");
  const Series yc = centered(target);
  const Eigen::Map<const Eigen::VectorXd> y(yc.data(), static_cast<Eigen::Index>(n_));
  // (K + lambda I) a = y  =>  y - K a = lambda a
  const Eigen::VectorXd coef = llt_.solve(y);
  Series out(n_);
  for (std::size_t i = 0; i < n_; ++i) out[i] = ridge_ * coef(static_cast<Eigen::Index>(i));
  return out;
}

Series kernel_ridge_residuals(SeriesView target, std::span<const SeriesView> Z,
                              const KernelRegParams& params) {
  return KernelRidge(Z, params).residuals(target);
}

double distance_correlation(SeriesView x, SeriesView y) {
  if (x.size() != y.size()) throw ValidationError("distance_correlation: length mismatch");
  if (x.size() < 4) throw ValidationError("distance_correlation: need at least 4 samples");
  if (is_constant(x) || is_constant(y)) return 0.0;
  const auto a = centered_distances(x);
  const auto b = centered_distances(y);
  return dcor_from(mean_product(a, b), mean_product(a, a), mean_product(b, b));
}

double dcor_perm_test(SeriesView x, SeriesView y, const KernelRegParams& params,
                      std::uint64_t seed) {
  if (x.size() != y.size()) throw ValidationError("dcor_perm_test: length mismatch");
  if (x.size() < 4) throw ValidationError("dcor_perm_test: need at least 4 samples");
  params.validate();
  if (is_constant(x) || is_constant(y)) return 1.0;

  const std::size_t n = x.size();
  const auto a = centered_distances(x);
  const auto b = centered_distances(y);
  const double observed = mean_product(a, b);

  // Permuting y permutes rows and columns of its centered distance matrix;
  // the distance variances stay fixed, so comparing dCov^2 suffices.
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  int exceed = 0;
  for (int p = 0; p < params.permutations; ++p) {
    std::shuffle(perm.begin(), perm.end(), rng);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double* arow = &a[i * n];
      const double* brow = &b[perm[i] * n];
      for (std::size_t j = 0; j < n; ++j) s += arow[j] * brow[perm[j]];
    }
    if (s / static_cast<double>(n * n) >= observed) ++exceed;
  }
  return (1.0 + exceed) / (1.0 + params.permutations);
}

CITestResult kridge_dcor_test(SeriesView x, SeriesView y, std::span<const SeriesView> Z,
                              const KernelRegParams& params, std::uint64_t seed) {
  if (x.size() != y.size()) throw ValidationError("kridge_dcor_test: length mismatch");
  CITestResult result;
  result.n_effective = x.size();
  if (is_constant(x) || is_constant(y)) return result;

  Series rx, ry;
  if (Z.empty()) {
    rx = centered(x);
    ry = centered(y);
  } else {
    const KernelRidge fit(Z, params);
    rx = fit.residuals(x);
    ry = fit.residuals(y);
    // fully explained by Z: nothing left to be dependent
    if (rms(rx) <= 1e-8 * rms(centered(x)) || rms(ry) <= 1e-8 * rms(centered(y))) return result;
  }
  result.statistic = distance_correlation(rx, ry);
  result.p_value = dcor_perm_test(rx, ry, params, seed);
  return result;
}

}  // namespace hricausal::stats
