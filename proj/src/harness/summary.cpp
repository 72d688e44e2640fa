#include "cwsubset/harness/summary.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/statistics/anderson_darling.hpp>
#include <boost/math/statistics/bivariate_statistics.hpp>
#include <boost/math/statistics/linear_regression.hpp>
#include <boost/math/statistics/univariate_statistics.hpp>

#include "cwsubset/errors.hpp"

namespace cwsubset::harness {

namespace bms = boost::math::statistics;

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw DomainError("quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("quantile level outside [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = p * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

Quartiles quartiles(const std::vector<double>& values) {
  return {quantile(values, 0.25), quantile(values, 0.5), quantile(values, 0.75)};
}

double mean(std::span<const double> values) {
  if (values.empty()) throw DomainError("mean of an empty sample");
  return bms::mean(values.begin(), values.end());
}

double sample_variance(std::span<const double> values) {
  if (values.size() < 2) throw DomainError("variance needs at least two values");
  return bms::sample_variance(values.begin(), values.end());
}

double sample_covariance(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("covariance needs two equal samples of size >= 2");
  const std::vector<double> u(x.begin(), x.end()), v(y.begin(), y.end());
  const double n = static_cast<double>(u.size());
  return bms::covariance(u, v) * n / (n - 1.0);
}

NormalityTest anderson_darling(std::vector<double> values, double level) {
  // Stephens (1974), case 3 (mean and variance estimated).
  double critical = 0.0;
  if (level == 0.10) critical = 0.631;
  else if (level == 0.05) critical = 0.752;
  else if (level == 0.025) critical = 0.873;
  else if (level == 0.01) critical = 1.035;
  else throw DomainError("unsupported Anderson-Darling level");
  if (values.size() < 8) throw DomainError("Anderson-Darling needs at least 8 values");
  std::sort(values.begin(), values.end());
  NormalityTest out;
  out.a2 = bms::anderson_darling_normality_statistic(values);
  const double n = static_cast<double>(values.size());
  out.a2_star = out.a2 * (1.0 + 0.75 / n + 2.25 / (n * n));
  out.critical = critical;
  out.passed = out.a2_star < critical;
  return out;
}

PowerFit log_log_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DomainError("log-log fit needs equal lengths");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0 && y[i] > 0.0) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  }
  if (lx.size() < 2) throw DomainError("log-log fit needs two positive points");
  const auto [c0, c1, r2] = bms::simple_ordinary_least_squares_with_R_squared(lx, ly);
  return {c1, c0, r2};
}

}  // namespace cwsubset::harness
