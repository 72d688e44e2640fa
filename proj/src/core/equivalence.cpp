#include "cwsubset/equivalence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cwsubset/curie_weiss.hpp"
#include "cwsubset/detail/int128.hpp"
#include "cwsubset/errors.hpp"

namespace cwsubset {

namespace {

using detail::i128;

// m extended by 0 below the critical point.
double m_of(double beta) { return beta > 1.0 ? solve_m(beta) : 0.0; }

Fraction alpha_of(const GroupSpec& group, const EquivalenceConfig& cfg) {
  return cfg.alpha ? *cfg.alpha : observed_fraction(group);
}

}  // namespace

SetMembership classify(const GroupStatistic& p, const GroupStatistic& t,
                       const GroupIntervals& pair_iv, const GroupIntervals& sum_iv, double b2,
                       const EquivalenceConfig& cfg) {
  const Fraction a = cfg.alpha ? *cfg.alpha : Fraction{pair_iv.k_obs, pair_iv.n_pop};
  const double alpha = a.value();
  const double b = cfg.b;
  const i128 n = t.n_obs;
  const i128 k = t.k_obs;
  const i128 sum = t.sum_sq;
  const double kd = t.k_obs;

  SetMembership m;
  const i128 np_num = static_cast<i128>(pair_iv.n_pop) * (sum - n * k);
  const i128 np_den = n * k * (k - 1);
  m.in_a = np_num <= -np_den;
  m.in_a_prime = sum * a.den <= n * k * (a.den - a.num);

  const double np = static_cast<double>(np_num) / static_cast<double>(np_den);
  m.in_b = np > -b / (1.0 + b) && p.value <= pair_iv.high_upper;
  m.in_b_prime =
      t.value > kd * (1.0 + (1.0 - alpha) * b) / (1.0 + b) && t.value <= sum_iv.high_upper;
  m.in_h = m.in_b && m.in_b_prime;

  const double lo = std::pow(m_of(b2), 2);
  const double hi = std::pow(m_of(b), 2);
  m.in_d = p.value >= lo && p.value <= hi;
  m.in_d_prime = t.value >= lo * kd * kd && t.value <= hi * kd * kd;
  m.in_l = m.in_d && m.in_d_prime;
  return m;
}

SetMembership classify_sample(const SampleMatrix& sample, std::size_t group,
                              const RegimeIntervals& pair_iv, const RegimeIntervals& sum_iv,
                              const EquivalenceConfig& cfg) {
  const SumSample sums = row_sums(sample);
  const StatisticVector p = compute_P(sums);
  const StatisticVector t = compute_T(sums);
  return classify(p[group], t[group], pair_iv[group], sum_iv[group], pair_iv.params.b2, cfg);
}

std::pair<double, double> minus_infinity_thresholds(const GroupSpec& group, double alpha) {
  const double k = group.k_obs;
  const double n = group.n_pop;
  return {k * (1.0 - alpha), k * (1.0 - (k - 1.0) / n)};
}

double min_m_prime(double lo, double hi, int points) {
  if (!(lo > 1.0 && hi >= lo)) throw DomainError("m' minimum needs 1 < lo <= hi");
  double best = std::min(m_prime(lo), m_prime(hi));
  for (int i = 1; i + 1 < points; ++i) {
    best = std::min(best, m_prime(lo + (hi - lo) * i / (points - 1)));
  }
  return best;
}

double equivalence_bound(const GroupSpec& group, const RegimeIntervals& pair_iv,
                         const EquivalenceConfig& cfg, Regime regime) {
  const double n = group.n_pop;
  const double k = group.k_obs;
  if (regime == Regime::High) {
    const Fraction a = alpha_of(group, cfg);
    const double alpha = a.value();
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("high-case bound needs alpha in (0, 1)");
    if (!(cfg.b > 0.0)) throw DomainError("high-case bound needs b > 0");
    const double b1 = pair_iv.params.b1;
    // |alpha - (K - 1)/N| on integers.
    const i128 mismatch = static_cast<i128>(a.num) * group.n_pop -
                          static_cast<i128>(a.den) * (group.k_obs - 1);
    const double gap = static_cast<double>(mismatch < 0 ? -mismatch : mismatch) /
                       (static_cast<double>(a.den) * n);
    return (1.0 / alpha) * std::pow(1.0 + cfg.b, 2) * b1 / (1.0 - b1) * gap;
  }
  if (regime == Regime::Low) {
    const double b2 = pair_iv.params.b2;
    if (!(cfg.b > b2)) throw DomainError("low-case bound needs b > b2");
    if (group.k_obs < 2) throw DomainError("low-case bound needs k_obs >= 2");
    return (1.0 / min_m_prime(b2, cfg.b)) * (1.0 / (2.0 * solve_m(b2))) * (2.0 / (k - 1.0));
  }
  throw DomainError("no equivalence bound in the critical regime");
}

std::uint64_t sample_digest(const SumSample& sample, std::size_t group) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) {
      h ^= (v >> (8 * i)) & 0xffu;
      h *= 0x100000001b3ULL;
    }
  };
  for (std::int32_t v : sample.groups.at(group).sigma) mix(static_cast<std::uint32_t>(v));
  return h;
}

EquivalenceAudit::EquivalenceAudit(const GroupSpec& group, std::size_t group_index,
                                   const RegimeIntervals& pair_iv, const RegimeIntervals& sum_iv,
                                   const EquivalenceConfig& cfg, Regime regime)
    : group_(group),
      index_(group_index),
      pair_iv_(pair_iv),
      sum_iv_(sum_iv),
      cfg_(cfg),
      alpha_(alpha_of(group, cfg)) {
  report_.regime = regime;
  report_.group = group_index;
  report_.bound = equivalence_bound(group, pair_iv, cfg, regime);
  const auto [zeta_thr, gamma_thr] = minus_infinity_thresholds(group, alpha_.value());
  report_.marginal_band = {std::min(zeta_thr, gamma_thr), std::max(zeta_thr, gamma_thr)};
}

bool EquivalenceAudit::add(const GroupStatistic& p, const GroupStatistic& t,
                           std::uint64_t digest) {
  ++report_.n_samples;
  const GroupIntervals& piv = pair_iv_[index_];
  const GroupIntervals& siv = sum_iv_[index_];
  const SetMembership m = classify(p, t, piv, siv, pair_iv_.params.b2, cfg_);
  const GroupEstimate g = estimate_gamma(p, piv);
  const GroupEstimate z = estimate_zeta(t, siv, alpha_);
  const long long before = report_.violations;
  auto flag = [&](long long& counter) {
    ++counter;
    ++report_.violations;
  };

  const bool g_minus = g.outcome == Outcome::MinusInfinity;
  const bool z_minus = z.outcome == Outcome::MinusInfinity;
  if (g_minus && z_minus) ++report_.n_both_minus_inf;
  if (g_minus != z_minus) ++report_.n_marginal;
  if (m.in_a && m.in_a_prime && !(g_minus && z_minus)) flag(report_.minus_inf_violations);

  const bool in_set = report_.regime == Regime::High ? m.in_h : m.in_l;
  if (in_set) {
    ++report_.n_in_set;
    const double gap = (g.finite() && z.finite()) ? std::abs(g.value - z.value)
                                                   : std::numeric_limits<double>::infinity();
    report_.max_gap = std::max(report_.max_gap, gap);
    if (!(gap <= report_.bound * (1.0 + 1e-12) + 1e-15)) flag(report_.bound_violations);

    if (report_.regime == Regime::High && g.finite() && z.finite()) {
      const double k = t.k_obs;
      const double lhs = k / piv.n_pop * g.value / (1.0 - g.value);
      const double rhs = k / (k - 1.0) * alpha_.value() * z.value / (1.0 - z.value);
      if (!(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(lhs)))) {
        flag(report_.identity_violations);
      }
    }
    if (report_.regime == Regime::Low) {
      const bool unanimous = t.sum_sq == static_cast<std::int64_t>(t.n_obs) * t.k_obs * t.k_obs;
      const bool ordered = unanimous ? g.value <= z.value : g.value < z.value;
      if (!ordered) flag(report_.order_violations);
    }
  }

  if (siv.classify(t.value) == Regime::Low && z.outcome != Outcome::Undecided &&
      (g.finite() || g.outcome == Outcome::PlusInfinity)) {
    auto m_sq = [](const GroupEstimate& e) {
      return e.outcome == Outcome::PlusInfinity ? 1.0 : std::pow(m_of(e.value), 2);
    };
    const double diff = std::abs(m_sq(g) - m_sq(z));
    report_.max_m_sq_gap = std::max(report_.max_m_sq_gap, diff);
    if (!(diff <= 2.0 / (t.k_obs - 1.0) + 1e-9)) flag(report_.m_sq_violations);
  }

  if (report_.violations != before) {
    if (before == 0) report_.first_violation_digest = digest;
    return false;
  }
  return true;
}

bool EquivalenceAudit::add(const SumSample& sample) {
  const StatisticVector p = compute_P(sample);
  const StatisticVector t = compute_T(sample);
  return add(p[index_], t[index_], sample_digest(sample, index_));
}

AuditReport audit_equivalence(std::span<const SumSample> samples, const GroupSpec& group,
                              std::size_t group_index, const RegimeIntervals& pair_iv,
                              const RegimeIntervals& sum_iv, const EquivalenceConfig& cfg,
                              Regime regime, bool throw_on_violation) {
  EquivalenceAudit audit(group, group_index, pair_iv, sum_iv, cfg, regime);
  for (const SumSample& s : samples) {
    if (!audit.add(s) && throw_on_violation) {
      throw AuditViolation("equivalence audit failed for group " + std::to_string(group_index),
                           sample_digest(s, group_index));
    }
  }
  return audit.report();
}

AuditReport audit_equivalence(std::span<const SampleMatrix> samples, const ModelSpec& spec,
                              std::size_t group_index, const RegimeIntervals& pair_iv,
                              const RegimeIntervals& sum_iv, const EquivalenceConfig& cfg,
                              Regime regime, bool throw_on_violation) {
  std::vector<SumSample> sums;
  sums.reserve(samples.size());
  for (const auto& s : samples) sums.push_back(row_sums(s));
  return audit_equivalence(sums, spec.groups.at(group_index), group_index, pair_iv, sum_iv, cfg,
                           regime, throw_on_violation);
}

}  // namespace cwsubset
