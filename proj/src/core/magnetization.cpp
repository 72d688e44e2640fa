#include "cwsubset/magnetization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

#include "cwsubset/errors.hpp"

namespace cwsubset {

double log_sum_exp(std::span<const double> values) {
  if (values.empty()) return -std::numeric_limits<double>::infinity();
  const double top = *std::max_element(values.begin(), values.end());
  if (!std::isfinite(top)) return top;
  double acc = 0.0;
  for (double v : values) acc += std::exp(v - top);
  return top + std::log(acc);
}

MagnetizationDistribution::MagnetizationDistribution(int n_pop, double beta)
    : n_pop_(n_pop), beta_(beta) {
  if (n_pop < 1) throw DomainError("magnetization_distribution: n_pop must be >= 1");
  if (!std::isfinite(beta)) throw DomainError("magnetization_distribution: beta must be finite");

  const int n = n_pop;
  const double log_n_fact = boost::math::lgamma(static_cast<double>(n) + 1.0);
  log_weights_.assign(n + 1, 0.0);
  for (int a = 0; 2 * a <= n; ++a) {
    const double s = margin(n, a);
    const double log_binom = log_n_fact - boost::math::lgamma(a + 1.0) -
                             boost::math::lgamma(static_cast<double>(n - a) + 1.0);
    const double lw = log_binom + beta * s * s / (2.0 * n);
    log_weights_[a] = lw;
    log_weights_[n - a] = lw;
  }
  log_z_ = log_sum_exp(log_weights_);

  probabilities_.resize(n + 1);
  double total = 0.0;
  for (int a = 0; a <= n; ++a) {
    probabilities_[a] = std::exp(log_weights_[a] - log_z_);
    total += probabilities_[a];
  }
  for (auto& p : probabilities_) p /= total;

  cdf_.resize(n + 1);
  double run = 0.0;
  for (int a = 0; a <= n; ++a) {
    run += probabilities_[a];
    cdf_[a] = run;
  }
  cdf_[n] = 1.0;
}

MagnetizationDistribution magnetization_distribution(int n_pop, double beta) {
  return MagnetizationDistribution(n_pop, beta);
}

HypergeometricPmf hypergeometric_pmf(int population, int marked, int draws) {
  if (population < 0 || marked < 0 || draws < 0 || marked > population || draws > population) {
    throw DomainError("hypergeometric_pmf: invalid arguments (" + std::to_string(population) + ", " +
                      std::to_string(marked) + ", " + std::to_string(draws) + ")");
  }
  HypergeometricPmf out;
  out.lo = std::max(0, draws - (population - marked));
  out.hi = std::min(draws, marked);
  const int width = out.hi - out.lo + 1;
  out.pmf.assign(width, 0.0);

  const long long big_n = population;
  const long long big_a = marked;
  const long long big_k = draws;
  int mode = static_cast<int>(((big_k + 1) * (big_a + 1)) / (big_n + 2));
  mode = std::clamp(mode, out.lo, out.hi);

  // p(h + 1) / p(h) = (A - h)(K - h) / ((h + 1)(N - A - K + h + 1))
  out.pmf[mode - out.lo] = 1.0;
  for (int h = mode; h < out.hi; ++h) {
    const double ratio = static_cast<double>((big_a - h) * (big_k - h)) /
                         static_cast<double>((h + 1) * (big_n - big_a - big_k + h + 1));
    out.pmf[h + 1 - out.lo] = out.pmf[h - out.lo] * ratio;
  }
  for (int h = mode; h > out.lo; --h) {
    const double ratio = static_cast<double>(h * (big_n - big_a - big_k + h)) /
                         static_cast<double>((big_a - h + 1) * (big_k - h + 1));
    out.pmf[h - 1 - out.lo] = out.pmf[h - out.lo] * ratio;
  }
  double total = 0.0;
  for (double p : out.pmf) total += p;
  for (auto& p : out.pmf) p /= total;
  return out;
}

}  // namespace cwsubset
