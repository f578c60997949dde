#include "hricausal/stats/parcorr.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/QR>
#include <boost/math/distributions/students_t.hpp>
#include <spdlog/spdlog.h>

#include "hricausal/error.hpp"

namespace hricausal::stats {

namespace {

double mean_of(SeriesView x) {
  double s = 0.0;
  for (double v : x) s += v;
  return x.empty() ? 0.0 : s / static_cast<double>(x.size());
}

double centered_norm(SeriesView x) {
  const double m = mean_of(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return std::sqrt(ss);
}

}  // namespace

bool is_constant(SeriesView x) {
  if (x.size() < 2) return true;
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  return *hi - *lo <= 1e-12 * std::max(1.0, std::max(std::abs(*hi), std::abs(*lo)));
}

double pearson(SeriesView x, SeriesView y) {
  if (x.size() != y.size()) throw ValidationError("pearson: length mismatch");
  if (x.size() < 3) throw ValidationError("pearson: need at least 3 samples");
  if (is_constant(x) || is_constant(y)) return 0.0;
  const double mx = mean_of(x);
  const double my = mean_of(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) return 0.0;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

Series residualize_linear(SeriesView target, std::span<const SeriesView> Z) {
  const auto n = static_cast<Eigen::Index>(target.size());
  for (const auto& z : Z) {
    if (z.size() != target.size()) throw ValidationError("residualize_linear: length mismatch");
  }
  if (Z.size() + 2 > target.size()) {
    throw ValidationError("residualize_linear: too many regressors for the sample size");
  }
  Series out(target.begin(), target.end());
  const double m = mean_of(target);
  if (Z.empty()) {
    for (double& v : out) v -= m;
    return out;
  }

  // Centering every column first is equivalent to fitting the intercept.
  Eigen::MatrixXd X(n, static_cast<Eigen::Index>(Z.size()));
  for (std::size_t c = 0; c < Z.size(); ++c) {
    const double mz = mean_of(Z[c]);
    for (Eigen::Index r = 0; r < n; ++r) X(r, static_cast<Eigen::Index>(c)) = Z[c][r] - mz;
  }
  Eigen::VectorXd y(n);
  for (Eigen::Index r = 0; r < n; ++r) y(r) = target[r] - m;

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  qr.setThreshold(1e-10);
  if (qr.rank() < X.cols()) {
    spdlog::debug("residualize_linear: dropping {} dependent regressor(s)", X.cols() - qr.rank());
  }
  const Eigen::VectorXd beta = qr.solve(y);
  const Eigen::VectorXd resid = y - X * beta;
  for (Eigen::Index r = 0; r < n; ++r) out[r] = resid(r);
  return out;
}

CITestResult parcorr_test(SeriesView x, SeriesView y, std::span<const SeriesView> Z) {
  if (x.size() != y.size()) throw ValidationError("parcorr_test: length mismatch");
  const std::size_t n = x.size();
  CITestResult result;
  result.n_effective = n;

  const long dof = static_cast<long>(n) - static_cast<long>(Z.size()) - 2;
  if (dof < 1 || n < 3 || is_constant(x) || is_constant(y)) return result;

  const Series rx = residualize_linear(x, Z);
  const Series ry = residualize_linear(y, Z);
  // A target fully explained by Z carries no residual information.
  if (centered_norm(rx) <= 1e-10 * centered_norm(x) || centered_norm(ry) <= 1e-10 * centered_norm(y)) {
    return result;
  }
  const double r = pearson(rx, ry);
  result.statistic = r;
  if (std::abs(r) >= 1.0) {
    result.p_value = 0.0;
    return result;
  }
  const double t = r * std::sqrt(static_cast<double>(dof) / (1.0 - r * r));
  const boost::math::students_t dist(static_cast<double>(dof));
  result.p_value = std::clamp(2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))), 0.0, 1.0);
  return result;
}

}  // namespace hricausal::stats
