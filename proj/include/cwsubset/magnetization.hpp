#pragma once

#include <span>
#include <vector>

namespace cwsubset {

// Law of the magnetization S of a single Curie-Weiss group, stored by
// sector. Sector a in [0, N] holds a plus spins, so s = 2a - N.
//
// Immutable after construction and safe to share between threads.
class MagnetizationDistribution {
 public:
  MagnetizationDistribution(int n_pop, double beta);

  int n_pop() const { return n_pop_; }
  double beta() const { return beta_; }
  double log_z() const { return log_z_; }

  static int margin(int n_pop, int sector) { return 2 * sector - n_pop; }

  // log[C(N, a) exp(beta s^2 / (2N))], indexed by sector a.
  std::span<const double> log_weights() const { return log_weights_; }
  // P(S = 2a - N), indexed by sector a.
  std::span<const double> probabilities() const { return probabilities_; }
  // Running sums of probabilities(); the last entry is exactly 1.
  std::span<const double> cdf() const { return cdf_; }

 private:
  int n_pop_;
  double beta_;
  double log_z_ = 0.0;
  std::vector<double> log_weights_;
  std::vector<double> probabilities_;
  std::vector<double> cdf_;
};

MagnetizationDistribution magnetization_distribution(int n_pop, double beta);

// Hypergeometric law of the number of marked items among `draws` drawn
// without replacement from `population` items of which `marked` are marked.
// pmf[h - lo] = P(H = h) for h in [lo, hi].
struct HypergeometricPmf {
  int lo = 0;
  int hi = 0;
  std::vector<double> pmf;
};

// Evaluated from the mode outwards by the ratio recursion and normalised
// by its own sum.
HypergeometricPmf hypergeometric_pmf(int population, int marked, int draws);

// log(exp(a_0) + ... + exp(a_n)), stable for large magnitudes.
double log_sum_exp(std::span<const double> values);

}  // namespace cwsubset
