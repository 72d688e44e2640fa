#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace cwsubset {

// Default cap on the number of (sector, hypergeometric support) terms
// exact_moments may sum.
inline constexpr std::int64_t kDefaultMomentBudget = 400'000'000;

struct ExactMoments {
  int n_pop = 0;
  int k_obs = 0;
  double beta = 0.0;
  double log_z = 0.0;
  // Index k holds E S^{2k} and E Sigma^{2k}; index 0 is 1.
  std::vector<double> e_s2k;
  std::vector<double> e_sigma2k;
  // E X_1 X_2; empty when n_pop == 1.
  std::optional<double> e_pair;

  int k_max() const { return static_cast<int>(e_s2k.size()) - 1; }
  double s2k(int k) const { return e_s2k.at(k); }
  double sigma2k(int k) const { return e_sigma2k.at(k); }

  // Var(Sigma^2); needs k_max >= 2.
  double var_sigma_sq() const;
};

// Throws ResourceError when the summation would exceed `budget` terms.
ExactMoments exact_moments(int n_pop, int k_obs, double beta, int k_max,
                           std::int64_t budget = kDefaultMomentBudget);

// E X_1 ... X_k; zero for odd k.
double correlation_moment(int n_pop, double beta, int k,
                          std::int64_t budget = kDefaultMomentBudget);

// Smallest value Sigma^2 can take: 0 for even K, 1 for odd K.
inline int min_sigma_sq(int k_obs) { return k_obs % 2; }

// Root in beta of E_{beta,N} Sigma^2 = target by bisection, to within
// 1e-9 K^2 of the target. E Sigma^2 is checked to increase along the way.
double ml_condition_solve(double target, int n_pop, int k_obs, std::pair<double, double> bracket,
                          std::int64_t budget = kDefaultMomentBudget);

}  // namespace cwsubset
