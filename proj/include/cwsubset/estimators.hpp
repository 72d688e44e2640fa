#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cwsubset/intervals.hpp"
#include "cwsubset/model.hpp"
#include "cwsubset/moments.hpp"
#include "cwsubset/statistics.hpp"

namespace cwsubset {

enum class Outcome { Finite, MinusInfinity, PlusInfinity, Undecided, NoInformation };

const char* to_string(Outcome o);

struct GroupEstimate {
  Outcome outcome = Outcome::Undecided;
  // +-inf for the infinite outcomes, NaN for Undecided / NoInformation.
  double value = 0.0;
  // Band the statistic fell into.
  Regime regime = Regime::Critical;
  std::optional<double> target;
  std::optional<double> variance;
  std::optional<std::pair<double, double>> ci95;
  std::string diagnostic;

  bool finite() const { return outcome == Outcome::Finite; }
};

struct EstimateResult {
  std::string estimator;
  std::vector<GroupEstimate> groups;

  const GroupEstimate& operator[](std::size_t g) const { return groups[g]; }
};

// Single-group forms of the two estimators below.
GroupEstimate estimate_gamma(const GroupStatistic& p, const GroupIntervals& iv);
GroupEstimate estimate_zeta(const GroupStatistic& t, const GroupIntervals& iv, Fraction alpha);

// Pair-correlation estimator. On the high band: -inf when P <= -1/N (tested
// exactly on the integer sums), else NP/(NP + 1). On the low band:
// m^{-1}(sqrt(P)). Undecided on the critical band.
EstimateResult estimate_gamma(const StatisticVector& p, const RegimeIntervals& intervals);

// ML-condition estimator. On the high band: -inf when T <= K(1 - alpha),
// else (T - K)/(T - (1 - alpha) K); NoInformation when alpha = 0. On the low
// band: m^{-1}(sqrt(T)/K). `alpha` empty means k_obs / n_pop.
EstimateResult estimate_zeta(const StatisticVector& t, const RegimeIntervals& intervals,
                             const std::vector<Fraction>& alpha = {});

struct TargetParams {
  Regime regime = Regime::High;
  double beta = 0.0;
  double alpha = 0.0;
  int n_pop = 0;
  int k_obs = 0;
  // E X1X2, E Sigma^2 and Var(Sigma^2) at the true coupling.
  double e_pair = 0.0;
  double e_sigma2 = 0.0;
  double var_sigma2 = 0.0;
  double gamma_tilde = 0.0;
  // Empty when alpha = 0 in the high regime.
  std::optional<double> zeta_tilde;
};

// Finite-N targets. The regime comes from the true coupling against
// (b1, b2). Throws RangeError when an exact moment cannot be inverted.
TargetParams compute_targets(const GroupSpec& group, double b1, double b2,
                             std::optional<Fraction> alpha = std::nullopt,
                             std::int64_t budget = kDefaultMomentBudget);
std::vector<TargetParams> compute_targets(const ModelSpec& spec, double b1, double b2,
                                          const std::vector<Fraction>& alpha = {});

// Inverses of the target identities, shared with the estimators.
double gamma_from_pair(double e_pair, int n_pop, Regime regime);
std::optional<double> zeta_from_sum(double e_sigma2, int k_obs, double alpha, Regime regime);

// Asymptotic variance of sqrt(n)(gamma_hat - gamma_tilde).
double asymptotic_variance_gamma(const TargetParams& targets);
// Asymptotic variance of sqrt(n)(zeta_hat - zeta_tilde).
double asymptotic_variance_zeta(const TargetParams& targets);

// Large-N limits of the high-regime variances.
double limit_variance_high_zeta(double beta, double alpha);

// value -/+ z sqrt(variance / n_obs). Throws DomainError for non-finite values.
std::pair<double, double> confidence_interval(double value, double variance, int n_obs,
                                              double level = 0.95);
std::pair<double, double> confidence_interval(const GroupEstimate& estimate, int n_obs,
                                              double level = 0.95);

// Fills target, variance and ci95 of every finite estimate.
void attach_inference(EstimateResult& result, const std::vector<TargetParams>& targets,
                      int n_obs, bool zeta);

}  // namespace cwsubset
