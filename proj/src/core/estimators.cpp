#include "cwsubset/estimators.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <boost/math/distributions/normal.hpp>

#include "cwsubset/curie_weiss.hpp"
#include "cwsubset/detail/int128.hpp"
#include "cwsubset/errors.hpp"

namespace cwsubset {

namespace {

using detail::i128;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

GroupEstimate undecided() {
  GroupEstimate e;
  e.outcome = Outcome::Undecided;
  e.value = kNaN;
  e.regime = Regime::Critical;
  return e;
}

GroupEstimate infinite(Outcome o, Regime r) {
  GroupEstimate e;
  e.outcome = o;
  e.value = o == Outcome::MinusInfinity ? -kInf : kInf;
  e.regime = r;
  return e;
}

GroupEstimate finite(double value, Regime r) {
  GroupEstimate e;
  e.outcome = Outcome::Finite;
  e.value = value;
  e.regime = r;
  return e;
}

// m^{-1}(y) for y in (0, 1]; y = 1 maps to +inf.
GroupEstimate invert_low(double y) {
  if (y >= 1.0) return infinite(Outcome::PlusInfinity, Regime::Low);
  if (!(y > 0.0)) {
    GroupEstimate e = undecided();
    e.diagnostic = "low band reached with a non-positive statistic";
    return e;
  }
  return finite(m_inverse(y), Regime::Low);
}

double to_double(i128 v) { return static_cast<double>(v); }

}  // namespace

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::Finite: return "finite";
    case Outcome::MinusInfinity: return "-inf";
    case Outcome::PlusInfinity: return "+inf";
    case Outcome::Undecided: return "undecided";
    case Outcome::NoInformation: return "no_information";
  }
  return "?";
}

GroupEstimate estimate_gamma(const GroupStatistic& s, const GroupIntervals& iv) {
  const Regime band = iv.classify(s.value);
  if (band == Regime::Critical) return undecided();
  if (band == Regime::Low) return invert_low(std::sqrt(s.value));

  const i128 n = s.n_obs;
  const i128 k = s.k_obs;
  const i128 big_n = iv.n_pop;
  // N P = N (S2 - nK) / (n K (K - 1)); P <= -1/N iff N (S2 - nK) <= -n K (K - 1).
  const i128 np_num = big_n * (static_cast<i128>(s.sum_sq) - n * k);
  const i128 np_den = n * k * (k - 1);
  if (np_num <= -np_den) return infinite(Outcome::MinusInfinity, Regime::High);
  return finite(to_double(np_num) / to_double(np_num + np_den), Regime::High);
}

GroupEstimate estimate_zeta(const GroupStatistic& s, const GroupIntervals& iv, Fraction a) {
  if (s.k_obs != iv.k_obs) throw DomainError("statistic and intervals disagree on k_obs");
  const Regime band = iv.classify(s.value);
  if (band == Regime::Critical) return undecided();
  if (band == Regime::Low) return invert_low(std::sqrt(s.value) / s.k_obs);
  if (a.num == 0) {
    GroupEstimate e;
    e.outcome = Outcome::NoInformation;
    e.value = kNaN;
    e.regime = Regime::High;
    e.diagnostic = "alpha = 0 leaves the high-band statistic without an estimator";
    return e;
  }
  const i128 n = s.n_obs;
  const i128 k = s.k_obs;
  const i128 sum = s.sum_sq;
  // T <= K (1 - alpha) iff S2 den <= n K (den - num).
  const i128 lhs = sum * a.den;
  const i128 threshold = n * k * (a.den - a.num);
  if (lhs <= threshold) return infinite(Outcome::MinusInfinity, Regime::High);
  const i128 num = (sum - n * k) * a.den;
  const i128 den = lhs - threshold;
  if (den == 0) {
    GroupEstimate e = infinite(Outcome::PlusInfinity, Regime::High);
    e.diagnostic = "singular high-band formula";
    return e;
  }
  return finite(to_double(num) / to_double(den), Regime::High);
}

EstimateResult estimate_gamma(const StatisticVector& p, const RegimeIntervals& intervals) {
  if (p.kind != StatisticKind::PairCorrelation) throw DomainError("estimate_gamma needs P");
  if (intervals.kind != IntervalKind::PairScale) {
    throw DomainError("estimate_gamma needs pair-scale intervals");
  }
  if (p.size() != intervals.groups.size()) throw DomainError("group count mismatch");
  EstimateResult out;
  out.estimator = "gamma";
  for (std::size_t g = 0; g < p.size(); ++g) out.groups.push_back(estimate_gamma(p[g], intervals[g]));
  return out;
}

EstimateResult estimate_zeta(const StatisticVector& t, const RegimeIntervals& intervals,
                             const std::vector<Fraction>& alpha) {
  if (t.kind != StatisticKind::SquaredSum) throw DomainError("estimate_zeta needs T");
  if (intervals.kind != IntervalKind::SumScale) {
    throw DomainError("estimate_zeta needs sum-scale intervals");
  }
  if (t.size() != intervals.groups.size()) throw DomainError("group count mismatch");
  if (!alpha.empty() && alpha.size() != t.size()) throw DomainError("one alpha per group required");
  EstimateResult out;
  out.estimator = "zeta";
  for (std::size_t g = 0; g < t.size(); ++g) {
    const GroupIntervals& iv = intervals[g];
    const Fraction a = alpha.empty() ? Fraction{iv.k_obs, iv.n_pop} : alpha[g];
    out.groups.push_back(estimate_zeta(t[g], iv, a));
  }
  return out;
}

double gamma_from_pair(double e_pair, int n_pop, Regime regime) {
  if (regime == Regime::High) {
    const double ne = n_pop * e_pair;
    if (!(ne > -1.0)) {
      throw RangeError("E X1X2 = " + std::to_string(e_pair) + " is not above -1/N");
    }
    return ne / (ne + 1.0);
  }
  if (regime == Regime::Low) {
    if (!(e_pair > 0.0 && e_pair < 1.0)) {
      throw RangeError("E X1X2 = " + std::to_string(e_pair) + " is outside (0, 1)");
    }
    return m_inverse(std::sqrt(e_pair));
  }
  throw DomainError("no target in the critical regime");
}

std::optional<double> zeta_from_sum(double e_sigma2, int k_obs, double alpha, Regime regime) {
  const double k = k_obs;
  if (regime == Regime::High) {
    if (alpha == 0.0) return std::nullopt;
    const double floor = (1.0 - alpha) * k;
    if (!(e_sigma2 > floor)) {
      throw RangeError("E Sigma^2 = " + std::to_string(e_sigma2) + " is not above K(1 - alpha)");
    }
    return (e_sigma2 - k) / (e_sigma2 - floor);
  }
  if (regime == Regime::Low) {
    const double y = std::sqrt(e_sigma2) / k;
    if (!(y > 0.0 && y < 1.0)) {
      throw RangeError("E Sigma^2 = " + std::to_string(e_sigma2) + " is outside (0, K^2)");
    }
    return m_inverse(y);
  }
  throw DomainError("no target in the critical regime");
}

TargetParams compute_targets(const GroupSpec& group, double b1, double b2,
                             std::optional<Fraction> alpha, std::int64_t budget) {
  validate(group);
  if (group.n_pop < 2) throw DomainError("targets need n_pop >= 2");
  TargetParams t;
  t.regime = coupling_regime(group.beta, b1, b2);
  t.beta = group.beta;
  t.n_pop = group.n_pop;
  t.k_obs = group.k_obs;
  t.alpha = (alpha ? *alpha : observed_fraction(group)).value();
  const ExactMoments em = exact_moments(group.n_pop, group.k_obs, group.beta, 2, budget);
  t.e_pair = *em.e_pair;
  t.e_sigma2 = em.sigma2k(1);
  t.var_sigma2 = em.var_sigma_sq();
  t.gamma_tilde = gamma_from_pair(t.e_pair, t.n_pop, t.regime);
  t.zeta_tilde = zeta_from_sum(t.e_sigma2, t.k_obs, t.alpha, t.regime);
  return t;
}

std::vector<TargetParams> compute_targets(const ModelSpec& spec, double b1, double b2,
                                          const std::vector<Fraction>& alpha) {
  validate(spec);
  if (!alpha.empty() && alpha.size() != spec.size()) throw DomainError("one alpha per group required");
  std::vector<TargetParams> out;
  for (std::size_t g = 0; g < spec.size(); ++g) {
    out.push_back(compute_targets(spec[g], b1, b2,
                                  alpha.empty() ? std::nullopt : std::optional(alpha[g])));
  }
  return out;
}

namespace {

double low_slope_sq(double target) {
  const double slope = 2.0 * solve_m(target) * m_prime(target);
  return slope * slope;
}

}  // namespace

double asymptotic_variance_gamma(const TargetParams& t) {
  if (t.k_obs < 2) throw DomainError("pair estimator needs k_obs >= 2");
  const double n = t.n_pop;
  const double k = t.k_obs;
  if (t.regime == Regime::High) {
    const double g = 1.0 - t.gamma_tilde;
    const double scale = n / (k - 1.0);
    return std::pow(g, 4) * scale * scale * t.var_sigma2 / (k * k);
  }
  if (t.regime == Regime::Low) {
    const double ratio = k / (k - 1.0);
    return ratio * ratio * t.var_sigma2 / std::pow(k, 4) / low_slope_sq(t.gamma_tilde);
  }
  throw DomainError("no asymptotic variance in the critical regime");
}

double asymptotic_variance_zeta(const TargetParams& t) {
  const double n = t.n_pop;
  const double k = t.k_obs;
  if (t.regime == Regime::High) {
    if (t.alpha == 0.0 || !t.zeta_tilde) throw DomainError("high-regime variance needs alpha > 0");
    if (t.k_obs < 2) throw DomainError("high-regime variance needs k_obs >= 2");
    const double z = 1.0 - *t.zeta_tilde;
    const double scale = n / (k - 1.0);
    return std::pow(z, 4) * scale * scale * t.var_sigma2 / (k * k);
  }
  if (t.regime == Regime::Low) {
    return t.var_sigma2 / std::pow(k, 4) / low_slope_sq(*t.zeta_tilde);
  }
  throw DomainError("no asymptotic variance in the critical regime");
}

double limit_variance_high_zeta(double beta, double alpha) {
  if (!(alpha > 0.0)) throw DomainError("limit needs alpha > 0");
  const double a = (1.0 - beta) * (1.0 - (1.0 - alpha) * beta);
  return 2.0 * a * a / (alpha * alpha);
}

std::pair<double, double> confidence_interval(double value, double variance, int n_obs,
                                              double level) {
  if (!std::isfinite(value)) throw DomainError("confidence interval needs a finite estimate");
  if (!(variance >= 0.0) || n_obs < 1) throw DomainError("confidence interval needs variance >= 0, n >= 1");
  if (!(level > 0.0 && level < 1.0)) throw DomainError("confidence level must lie in (0, 1)");
  const boost::math::normal_distribution<double> z;
  const double half = boost::math::quantile(z, 0.5 + 0.5 * level) * std::sqrt(variance / n_obs);
  return {value - half, value + half};
}

std::pair<double, double> confidence_interval(const GroupEstimate& e, int n_obs, double level) {
  if (!e.finite()) throw DomainError("confidence interval needs a finite estimate");
  if (!e.variance) throw DomainError("estimate carries no variance");
  return confidence_interval(e.value, *e.variance, n_obs, level);
}

void attach_inference(EstimateResult& result, const std::vector<TargetParams>& targets,
                      int n_obs, bool zeta) {
  if (targets.size() != result.groups.size()) throw DomainError("one target per group required");
  for (std::size_t g = 0; g < targets.size(); ++g) {
    GroupEstimate& e = result.groups[g];
    const TargetParams& t = targets[g];
    e.target = zeta ? t.zeta_tilde : std::optional(t.gamma_tilde);
    try {
      e.variance = zeta ? asymptotic_variance_zeta(t) : asymptotic_variance_gamma(t);
    } catch (const DomainError&) {
      e.variance.reset();
    }
    if (e.finite() && e.variance) e.ci95 = confidence_interval(e, n_obs);
  }
}

}  // namespace cwsubset
