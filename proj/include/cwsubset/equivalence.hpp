#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>

#include "cwsubset/estimators.hpp"
#include "cwsubset/intervals.hpp"
#include "cwsubset/sampler.hpp"
#include "cwsubset/statistics.hpp"

namespace cwsubset {

struct EquivalenceConfig {
  // High case: b > 0. Low case: b > b2.
  double b = 1.0;
  // Observed fraction; empty means k_obs / n_pop of the group.
  std::optional<Fraction> alpha;
};

struct SetMembership {
  bool in_a = false;
  bool in_a_prime = false;
  bool in_b = false;
  bool in_b_prime = false;
  bool in_h = false;
  bool in_d = false;
  bool in_d_prime = false;
  bool in_l = false;
};

// Membership of one group's (P, T) pair in the equivalence sets:
//   A : P <= -1/N                     A': T <= K(1 - alpha)
//   B : P > -b/((1 + b)N), P in J_h   B': T > K(1 + (1 - alpha)b)/(1 + b), T in J'_h
//   D : P in [m(b2)^2, m(b)^2]        D': T in K^2 [m(b2)^2, m(b)^2]
// with H = B and B', L = D and D'.
SetMembership classify(const GroupStatistic& p, const GroupStatistic& t,
                       const GroupIntervals& pair_iv, const GroupIntervals& sum_iv, double b2,
                       const EquivalenceConfig& cfg);

SetMembership classify_sample(const SampleMatrix& sample, std::size_t group,
                              const RegimeIntervals& pair_iv, const RegimeIntervals& sum_iv,
                              const EquivalenceConfig& cfg);

// T thresholds at or below which zeta_hat resp. gamma_hat is -inf:
// (K(1 - alpha), K(1 - (K - 1)/N)).
std::pair<double, double> minus_infinity_thresholds(const GroupSpec& group, double alpha);

// Uniform bound on |gamma_hat - zeta_hat| over H (High) or L (Low).
// Low: 1/min_{[b2, b]} m' * 1/(2 m(b2)) * 2/(K - 1), with the minimum taken
// over a 1024-point grid including both end points.
double equivalence_bound(const GroupSpec& group, const RegimeIntervals& pair_iv,
                         const EquivalenceConfig& cfg, Regime regime);

double min_m_prime(double lo, double hi, int points = 1024);

struct AuditReport {
  Regime regime = Regime::High;
  std::size_t group = 0;
  long long n_samples = 0;
  long long n_in_set = 0;       // samples in H (High) or L (Low)
  long long n_both_minus_inf = 0;
  long long n_marginal = 0;     // exactly one estimator is -inf
  double bound = 0.0;
  double max_gap = 0.0;
  long long violations = 0;     // all kinds below
  long long bound_violations = 0;
  long long minus_inf_violations = 0;
  long long identity_violations = 0;  // High-case algebraic identity
  long long order_violations = 0;     // gamma_hat <= zeta_hat on L
  long long m_sq_violations = 0;      // |m(g)^2 - m(z)^2| <= 2/(K-1) on J'_l
  double max_m_sq_gap = 0.0;
  std::pair<double, double> marginal_band{0.0, 0.0};
  std::uint64_t first_violation_digest = 0;
};

// Streaming audit of one group. add() returns false on a violation.
class EquivalenceAudit {
 public:
  EquivalenceAudit(const GroupSpec& group, std::size_t group_index,
                   const RegimeIntervals& pair_iv, const RegimeIntervals& sum_iv,
                   const EquivalenceConfig& cfg, Regime regime);

  bool add(const GroupStatistic& p, const GroupStatistic& t, std::uint64_t digest);
  bool add(const SumSample& sample);

  const AuditReport& report() const { return report_; }

 private:
  GroupSpec group_;
  std::size_t index_;
  const RegimeIntervals& pair_iv_;
  const RegimeIntervals& sum_iv_;
  EquivalenceConfig cfg_;
  Fraction alpha_;
  AuditReport report_;
};

// FNV-1a over the group's row sums.
std::uint64_t sample_digest(const SumSample& sample, std::size_t group);

// Audits every sample; throws AuditViolation on the first violation when
// `throw_on_violation` is set.
AuditReport audit_equivalence(std::span<const SumSample> samples, const GroupSpec& group,
                              std::size_t group_index, const RegimeIntervals& pair_iv,
                              const RegimeIntervals& sum_iv, const EquivalenceConfig& cfg,
                              Regime regime, bool throw_on_violation = true);
AuditReport audit_equivalence(std::span<const SampleMatrix> samples, const ModelSpec& spec,
                              std::size_t group_index, const RegimeIntervals& pair_iv,
                              const RegimeIntervals& sum_iv, const EquivalenceConfig& cfg,
                              Regime regime, bool throw_on_violation = true);

}  // namespace cwsubset
