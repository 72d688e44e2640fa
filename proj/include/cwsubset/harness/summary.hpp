#pragma once

#include <span>
#include <vector>

namespace cwsubset::harness {

struct Quartiles {
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double iqr() const { return q3 - q1; }
};

// Type-7 quantiles (linear interpolation between order statistics).
double quantile(std::vector<double> values, double p);
Quartiles quartiles(const std::vector<double>& values);

double mean(std::span<const double> values);
// Unbiased (n - 1) sample variance and covariance.
double sample_variance(std::span<const double> values);
double sample_covariance(std::span<const double> x, std::span<const double> y);

struct NormalityTest {
  double a2 = 0.0;        // Anderson-Darling statistic with estimated mean and sd
  double a2_star = 0.0;   // small-sample adjusted: A2 (1 + 0.75/n + 2.25/n^2)
  double critical = 0.0;  // critical value of a2_star at the chosen level
  bool passed = false;
};

// Composite normality test. Supported levels: 0.10, 0.05, 0.025, 0.01.
NormalityTest anderson_darling(std::vector<double> values, double level = 0.01);

struct PowerFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

// Least squares of log(y) on log(x); entries with y <= 0 are skipped.
PowerFit log_log_fit(std::span<const double> x, std::span<const double> y);

}  // namespace cwsubset::harness
