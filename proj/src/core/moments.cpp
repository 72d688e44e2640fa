#include "cwsubset/moments.hpp"

#include <cmath>
#include <string>

#include "cwsubset/errors.hpp"
#include "cwsubset/magnetization.hpp"

namespace cwsubset {

namespace {

void check_group(int n_pop, int k_obs) {
  if (n_pop < 1) throw DomainError("n_pop must be >= 1");
  if (k_obs < 1 || k_obs > n_pop) throw DomainError("k_obs must lie in [1, n_pop]");
}

void check_budget(int n_pop, int k_obs, std::int64_t budget) {
  const std::int64_t work = static_cast<std::int64_t>(n_pop + 1) * (k_obs + 1);
  if (work > budget) {
    throw ResourceError("moment summation needs " + std::to_string(work) +
                        " terms, budget is " + std::to_string(budget));
  }
}

}  // namespace

double ExactMoments::var_sigma_sq() const {
  const double m2 = sigma2k(1);
  return sigma2k(2) - m2 * m2;
}

ExactMoments exact_moments(int n_pop, int k_obs, double beta, int k_max, std::int64_t budget) {
  check_group(n_pop, k_obs);
  if (k_max < 1) throw DomainError("k_max must be >= 1");
  check_budget(n_pop, k_obs, budget);

  const MagnetizationDistribution dist(n_pop, beta);
  const auto prob = dist.probabilities();

  ExactMoments out;
  out.n_pop = n_pop;
  out.k_obs = k_obs;
  out.beta = beta;
  out.log_z = dist.log_z();
  out.e_s2k.assign(k_max + 1, 0.0);
  out.e_sigma2k.assign(k_max + 1, 0.0);
  out.e_s2k[0] = 1.0;
  out.e_sigma2k[0] = 1.0;

  for (int a = 0; a <= n_pop; ++a) {
    const double p = prob[a];
    const double s = MagnetizationDistribution::margin(n_pop, a);
    const double s2 = s * s;
    double pw = 1.0;
    for (int k = 1; k <= k_max; ++k) {
      pw *= s2;
      out.e_s2k[k] += p * pw;
    }

    const HypergeometricPmf hyp = hypergeometric_pmf(n_pop, a, k_obs);
    for (int h = hyp.lo; h <= hyp.hi; ++h) {
      const double q = p * hyp.pmf[h - hyp.lo];
      const double sig = 2.0 * h - k_obs;
      const double sig2 = sig * sig;
      double pw_sig = 1.0;
      for (int k = 1; k <= k_max; ++k) {
        pw_sig *= sig2;
        out.e_sigma2k[k] += q * pw_sig;
      }
    }
  }

  if (n_pop >= 2) {
    const double n = n_pop;
    out.e_pair = (out.e_s2k[1] - n) / (n * (n - 1.0));
  }
  return out;
}

double correlation_moment(int n_pop, double beta, int k, std::int64_t budget) {
  if (k < 1 || k > n_pop) throw DomainError("correlation order must lie in [1, n_pop]");
  if (k % 2 == 1) return 0.0;
  check_budget(n_pop, k, budget);

  const MagnetizationDistribution dist(n_pop, beta);
  const auto prob = dist.probabilities();
  double acc = 0.0;
  for (int a = 0; a <= n_pop; ++a) {
    const HypergeometricPmf hyp = hypergeometric_pmf(n_pop, a, k);
    double inner = 0.0;
    for (int h = hyp.lo; h <= hyp.hi; ++h) {
      // h plus spins among k: product is (-1)^(k - h).
      inner += ((k - h) % 2 == 0 ? 1.0 : -1.0) * hyp.pmf[h - hyp.lo];
    }
    acc += prob[a] * inner;
  }
  return acc;
}

double ml_condition_solve(double target, int n_pop, int k_obs, std::pair<double, double> bracket,
                          std::int64_t budget) {
  check_group(n_pop, k_obs);
  const double k = k_obs;
  if (!(target > min_sigma_sq(k_obs) && target < k * k)) {
    throw DomainError("ml_condition_solve: target " + std::to_string(target) +
                      " outside (min Range(Sigma^2), K^2)");
  }
  auto f = [&](double beta) { return exact_moments(n_pop, k_obs, beta, 1, budget).sigma2k(1); };

  double lo = bracket.first;
  double hi = bracket.second;
  if (!(lo < hi)) throw BracketError("ml_condition_solve: empty bracket");
  double f_lo = f(lo);
  double f_hi = f(hi);
  if (!(f_lo <= target && target <= f_hi)) {
    throw BracketError("ml_condition_solve: target " + std::to_string(target) +
                       " not enclosed by [" + std::to_string(f_lo) + ", " +
                       std::to_string(f_hi) + "]");
  }

  const double tol = 1e-9 * k * k;
  if (std::abs(f_lo - target) <= tol) return lo;
  if (std::abs(f_hi - target) <= tol) return hi;

  for (int iter = 0; iter < 400; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) return mid;
    const double f_mid = f(mid);
    const double slack = 1e-13 * k * k;
    if (!(f_mid >= f_lo - slack && f_mid <= f_hi + slack)) {
      throw MonotonicityError("ml_condition_solve: E Sigma^2 not increasing near beta = " +
                              std::to_string(mid));
    }
    if (std::abs(f_mid - target) <= tol) return mid;
    if (f_mid < target) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
      f_hi = f_mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace cwsubset
