#include "cwsubset/intervals.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cwsubset/curie_weiss.hpp"
#include "cwsubset/errors.hpp"
#include "cwsubset/moments.hpp"

namespace cwsubset {

const char* to_string(Regime r) {
  switch (r) {
    case Regime::High: return "high";
    case Regime::Critical: return "critical";
    case Regime::Low: return "low";
  }
  return "?";
}

const char* to_string(IntervalKind k) {
  return k == IntervalKind::PairScale ? "pair" : "sum";
}

Regime GroupIntervals::classify(double statistic) const {
  if (statistic <= high_upper) return Regime::High;
  if (statistic >= low_lower) return Regime::Low;
  return Regime::Critical;
}

RegimeIntervals build_intervals(const ModelSpec& spec, const IntervalParams& params,
                                IntervalKind kind, const std::vector<Fraction>& alpha) {
  validate(spec);
  const double b1 = params.b1;
  const double b2 = params.b2;
  if (!(b1 >= 0.0 && b1 < 1.0 && b2 > 1.0)) {
    throw DomainError("intervals need 0 <= b1 < 1 < b2");
  }
  if (!alpha.empty() && alpha.size() != spec.size()) {
    throw DomainError("one observed fraction per group required");
  }
  const auto& c = params.constants;
  const double m2 = std::pow(solve_m(b2), 2);

  RegimeIntervals out;
  out.kind = kind;
  out.params = params;
  for (std::size_t g = 0; g < spec.size(); ++g) {
    GroupIntervals gi;
    gi.n_pop = spec[g].n_pop;
    gi.k_obs = spec[g].k_obs;
    gi.alpha = alpha.empty() ? observed_fraction(spec[g]).value() : alpha[g].value();
    const double n = gi.n_pop;
    const double k = gi.k_obs;
    const double ln_n = std::log(n);
    const double low_shape = std::pow(ln_n, 1.5) / std::sqrt(n);
    if (kind == IntervalKind::PairScale) {
      gi.high_upper = b1 / ((1.0 - b1) * n) + c.c_high * std::pow(ln_n / n, 2);
      gi.low_lower = m2 - c.c_low * low_shape;
    } else {
      gi.high_upper = (1.0 - (1.0 - gi.alpha) * b1) / (1.0 - b1) * k + c.d_high * std::sqrt(k);
      gi.low_lower = (m2 - c.d_low * low_shape) * k * k;
    }
    if (!(gi.high_upper < gi.low_lower)) throw SeparationViolated(g, gi.high_upper, gi.low_lower);
    out.groups.push_back(gi);
  }
  return out;
}

Regime coupling_regime(double beta, double b1, double b2) {
  if (beta <= b1) return Regime::High;
  if (beta >= b2) return Regime::Low;
  throw DomainError("coupling " + std::to_string(beta) + " lies strictly between b1 and b2");
}

IntervalConstants calibrate_constants(const CalibrationSettings& s) {
  IntervalConstants out{0.0, 0.0, 0.0, 0.0};
  const int pts = std::max(2, s.beta_points);
  for (int n_pop = s.n_min; n_pop <= s.n_max; n_pop += s.n_step) {
    const int k_obs = std::clamp(static_cast<int>(std::lround(s.alpha * n_pop)), 1, n_pop);
    const double n = n_pop;
    const double k = k_obs;
    const double ln_n = std::log(n);
    const double high_shape = std::pow(ln_n / n, 2);
    const double low_shape = std::pow(ln_n, 1.5) / std::sqrt(n);
    for (int i = 0; i < pts; ++i) {
      const double beta_h = s.b1 * i / (pts - 1);
      const ExactMoments h = exact_moments(n_pop, k_obs, beta_h, 1);
      const double pair_h = beta_h / ((1.0 - beta_h) * n);
      const double sum_h = (1.0 - (1.0 - s.alpha) * beta_h) / (1.0 - beta_h) * k;
      out.c_high = std::max(out.c_high, std::abs(*h.e_pair - pair_h) / high_shape);
      out.d_high = std::max(out.d_high, std::abs(h.sigma2k(1) - sum_h) / std::sqrt(k));

      const double beta_l = s.b2 + s.low_span * i / (pts - 1);
      const ExactMoments l = exact_moments(n_pop, k_obs, beta_l, 1);
      const double m2 = std::pow(solve_m(beta_l), 2);
      out.c_low = std::max(out.c_low, std::abs(*l.e_pair - m2) / low_shape);
      out.d_low = std::max(out.d_low, std::abs(l.sigma2k(1) - m2 * k * k) / (low_shape * k * k));
    }
  }
  return out;
}

}  // namespace cwsubset
