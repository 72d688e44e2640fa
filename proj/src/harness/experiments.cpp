#include "cwsubset/harness/experiments.hpp"

#include <cmath>
#include <filesystem>
#include <limits>
#include <tuple>

#include "cwsubset/curie_weiss.hpp"
#include "cwsubset/errors.hpp"
#include "cwsubset/harness/parallel.hpp"
#include "cwsubset/moments.hpp"
#include "cwsubset/statistics.hpp"

namespace cwsubset::harness {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using Json = nlohmann::ordered_json;

std::string opt_text(const std::optional<double>& v) { return v ? format_double(*v) : ""; }
Json opt_json(const std::optional<double>& v) { return v ? json_number(*v) : Json(nullptr); }

Json quartiles_json(const Quartiles& q) {
  return {{"q1", json_number(q.q1)}, {"median", json_number(q.median)}, {"q3", json_number(q.q3)},
          {"iqr", json_number(q.iqr())}};
}

Json outcomes_json(const OutcomeCounts& c) {
  return {{"finite", c.finite},
          {"-inf", c.minus_inf},
          {"+inf", c.plus_inf},
          {"undecided", c.undecided},
          {"no_information", c.no_information}};
}

GroupEstimate flagged(Outcome o, Regime regime, std::string diagnostic) {
  GroupEstimate e;
  e.outcome = o;
  e.value = kNaN;
  e.regime = regime;
  e.diagnostic = std::move(diagnostic);
  return e;
}

// Exact targets at `beta` forced into `regime`.
TargetParams targets_in_regime(GroupSpec group, double beta, Regime regime, std::optional<Fraction> alpha) {
  group.beta = beta;
  if (regime == Regime::High) return compute_targets(group, beta, beta + 1.0, alpha);
  return compute_targets(group, beta - 1.0, beta, alpha);
}

std::optional<double> variance_of(const std::string& estimator, const TargetParams& t) {
  try {
    if (estimator == "gamma" || estimator == "gamma2") return asymptotic_variance_gamma(t);
    if (estimator == "zeta" && t.zeta_tilde) return asymptotic_variance_zeta(t);
  } catch (const std::exception&) {
  }
  return std::nullopt;
}

int k_for_fraction(int n_pop, Fraction f) {
  const auto k = (static_cast<std::int64_t>(n_pop) * f.num * 2 + f.den) / (2 * f.den);
  return static_cast<int>(std::clamp<std::int64_t>(k, 1, n_pop));
}

}  // namespace

EstimatorBench::EstimatorBench(const ExperimentConfig& cfg)
    : model_(cfg.model),
      alpha_(cfg.alpha),
      params_(cfg.intervals),
      estimators_(cfg.estimators),
      ml_bracket_(cfg.ml_bracket) {
  if (model_.size() == 0) throw DomainError("experiment needs a [model] with at least one group");
  validate(model_);
  pair_iv_ = build_intervals(model_, params_, IntervalKind::PairScale, alpha_);
  sum_iv_ = build_intervals(model_, params_, IntervalKind::SumScale, alpha_);
  samplers_.reserve(model_.size());
  for (const auto& g : model_.groups) samplers_.emplace_back(g);
  for (std::size_t e = 0; e < estimators_.size(); ++e) {
    auto& row = targets_.emplace_back();
    for (std::size_t g = 0; g < model_.size(); ++g) {
      if (estimators_[e] == "ml_oracle") {
        row.emplace_back();
        continue;
      }
      try {
        const GroupSpec group = estimator_group(e, g);
        const std::optional<Fraction> a =
            estimators_[e] == "gamma2" ? std::nullopt : std::optional(alpha(g));
        row.emplace_back(compute_targets(group, params_.b1, params_.b2, a));
      } catch (const DomainError&) {
        row.emplace_back();
      } catch (const RangeError&) {
        row.emplace_back();
      }
    }
  }
}

Fraction EstimatorBench::alpha(std::size_t g) const {
  return alpha_.empty() ? observed_fraction(model_[g]) : alpha_[g];
}

GroupSpec EstimatorBench::estimator_group(std::size_t e, std::size_t g) const {
  GroupSpec group = model_[g];
  if (estimators_[e] == "gamma2") group.k_obs = std::min(2, group.n_pop);
  return group;
}

SumSample EstimatorBench::draw(int n_obs, std::uint64_t seed, std::uint64_t stream) const {
  return sample_sums(std::span<const GroupSampler>(samplers_), n_obs, SamplerConfig{seed, stream});
}

std::vector<std::vector<GroupEstimate>> EstimatorBench::evaluate(const SumSample& sample) const {
  std::vector<std::vector<GroupEstimate>> out;
  for (const auto& name : estimators_) {
    auto& row = out.emplace_back();
    if (name == "gamma" || name == "gamma2") {
      const StatisticVector p = name == "gamma" ? compute_P(sample) : compute_P2(sample);
      for (std::size_t g = 0; g < p.size(); ++g) row.push_back(estimate_gamma(p[g], pair_iv_[g]));
    } else if (name == "zeta") {
      const StatisticVector t = compute_T(sample);
      for (std::size_t g = 0; g < t.size(); ++g) row.push_back(estimate_zeta(t[g], sum_iv_[g], alpha(g)));
    } else if (name == "ml_oracle") {
      const StatisticVector t = compute_T(sample);
      for (std::size_t g = 0; g < t.size(); ++g) {
        const Regime band = sum_iv_[g].classify(t[g].value);
        try {
          GroupEstimate e;
          e.outcome = Outcome::Finite;
          e.value = ml_condition_solve(t[g].value, model_[g].n_pop, model_[g].k_obs, ml_bracket_);
          e.regime = band;
          row.push_back(e);
        } catch (const BracketError& err) {
          row.push_back(flagged(Outcome::Undecided, band, err.what()));
        } catch (const DomainError& err) {
          row.push_back(flagged(Outcome::Undecided, band, err.what()));
        }
      }
    } else {
      throw DomainError("unknown estimator " + name);
    }
  }
  return out;
}

std::optional<double> EstimatorBench::target(std::size_t e, std::size_t g) const {
  const auto& name = estimators_[e];
  if (name == "ml_oracle") return model_[g].beta;
  const auto& t = targets_[e][g];
  if (!t) return std::nullopt;
  if (name == "zeta") return t->zeta_tilde;
  return t->gamma_tilde;
}

std::optional<double> EstimatorBench::oracle_variance(std::size_t e, std::size_t g) const {
  const auto& t = targets_[e][g];
  if (!t) return std::nullopt;
  return variance_of(estimators_[e], *t);
}

std::optional<double> EstimatorBench::plugin_variance(std::size_t e, std::size_t g,
                                                      const GroupEstimate& est) const {
  if (!est.finite() || estimators_[e] == "ml_oracle" || est.regime == Regime::Critical) return std::nullopt;
  try {
    const std::optional<Fraction> a = estimators_[e] == "gamma2" ? std::nullopt : std::optional(alpha(g));
    return variance_of(estimators_[e], targets_in_regime(estimator_group(e, g), est.value, est.regime, a));
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

void OutcomeCounts::add(Outcome o) {
  switch (o) {
    case Outcome::Finite: ++finite; break;
    case Outcome::MinusInfinity: ++minus_inf; break;
    case Outcome::PlusInfinity: ++plus_inf; break;
    case Outcome::Undecided: ++undecided; break;
    case Outcome::NoInformation: ++no_information; break;
  }
}

namespace {

using Estimates = std::vector<std::vector<GroupEstimate>>;

// [n index][replication] -> estimates
std::vector<std::vector<Estimates>> replicate(const EstimatorBench& bench, const ExperimentConfig& cfg) {
  const std::size_t reps = static_cast<std::size_t>(cfg.replications);
  const auto flat = parallel_map(cfg.n_obs.size() * reps, cfg.threads, [&](std::size_t i) {
    const std::size_t ni = i / reps;
    const std::size_t rep = i % reps;
    return bench.evaluate(bench.draw(cfg.n_obs[ni], cfg.seed, stream_id(ni, rep)));
  });
  std::vector<std::vector<Estimates>> out(cfg.n_obs.size());
  for (std::size_t i = 0; i < flat.size(); ++i) out[i / reps].push_back(flat[i]);
  return out;
}

}  // namespace

ConsistencyResult run_consistency(const ExperimentConfig& cfg) {
  const EstimatorBench bench(cfg);
  const auto runs = replicate(bench, cfg);
  ConsistencyResult res;
  for (std::size_t g = 0; g < bench.model().size(); ++g) {
    for (std::size_t e = 0; e < bench.estimators().size(); ++e) {
      std::optional<double> previous;
      for (std::size_t ni = 0; ni < cfg.n_obs.size(); ++ni) {
        ConsistencyCell cell;
        cell.group = g;
        cell.estimator = bench.estimators()[e];
        cell.n_obs = cfg.n_obs[ni];
        cell.target = bench.target(e, g);
        for (const auto& rep : runs[ni]) {
          const GroupEstimate& est = rep[e][g];
          cell.outcomes.add(est.outcome);
          if (!cell.target) cell.abs_errors.push_back(kNaN);
          else cell.abs_errors.push_back(est.finite() ? std::abs(est.value - *cell.target) : kInf);
        }
        if (cell.target) {
          cell.error = quartiles(cell.abs_errors);
          if (previous && cell.error.median > *previous) res.medians_non_increasing = false;
          previous = cell.error.median;
        } else {
          cell.error = {kNaN, kNaN, kNaN};
        }
        res.cells.push_back(std::move(cell));
      }
    }
  }
  return res;
}

CltResult run_clt(const ExperimentConfig& cfg) {
  const EstimatorBench bench(cfg);
  const auto runs = replicate(bench, cfg);
  CltResult res;
  for (std::size_t ni = 0; ni < cfg.n_obs.size(); ++ni) {
    const double root_n = std::sqrt(static_cast<double>(cfg.n_obs[ni]));
    for (std::size_t e = 0; e < bench.estimators().size(); ++e) {
      // Replication-aligned scaled errors per group, NaN where not finite.
      std::vector<std::vector<double>> aligned(bench.model().size());
      for (std::size_t g = 0; g < bench.model().size(); ++g) {
        CltCell cell;
        cell.group = g;
        cell.estimator = bench.estimators()[e];
        cell.n_obs = cfg.n_obs[ni];
        cell.target = bench.target(e, g);
        for (const auto& rep : runs[ni]) {
          const GroupEstimate& est = rep[e][g];
          cell.outcomes.add(est.outcome);
          const double z = est.finite() && cell.target ? root_n * (est.value - *cell.target) : kNaN;
          aligned[g].push_back(z);
          if (!std::isnan(z)) cell.scaled.push_back(z);
        }
        cell.empirical_variance = cell.scaled.size() >= 2 ? sample_variance(cell.scaled) : kNaN;
        cell.formula_variance = bench.oracle_variance(e, g);
        if (cell.formula_variance && *cell.formula_variance > 0.0) {
          cell.ratio = cell.empirical_variance / *cell.formula_variance;
          if (!(std::abs(*cell.ratio - 1.0) <= 0.15)) res.passed = false;
        }
        if (cell.scaled.size() >= 8) {
          cell.normality = anderson_darling(cell.scaled, 0.01);
          if (cell.formula_variance && !cell.normality->passed) res.passed = false;
        }
        res.cells.push_back(std::move(cell));
      }
      for (std::size_t a = 0; a < aligned.size(); ++a) {
        for (std::size_t b = a + 1; b < aligned.size(); ++b) {
          std::vector<double> x, y;
          for (std::size_t r = 0; r < aligned[a].size(); ++r) {
            if (!std::isnan(aligned[a][r]) && !std::isnan(aligned[b][r])) {
              x.push_back(aligned[a][r]);
              y.push_back(aligned[b][r]);
            }
          }
          if (x.size() < 3) continue;
          CrossCovariance c;
          c.estimator = bench.estimators()[e];
          c.n_obs = cfg.n_obs[ni];
          c.group_a = a;
          c.group_b = b;
          c.covariance = sample_covariance(x, y);
          c.std_error = std::sqrt(sample_variance(x) * sample_variance(y) / static_cast<double>(x.size()));
          c.within_3se = std::abs(c.covariance) <= 3.0 * c.std_error;
          if (!c.within_3se) res.passed = false;
          res.cross.push_back(c);
        }
      }
    }
  }
  return res;
}

CoverageResult run_coverage(const ExperimentConfig& cfg) {
  const EstimatorBench bench(cfg);
  const bool plugin = cfg.variance == "plugin";
  const std::size_t reps = static_cast<std::size_t>(cfg.replications);
  const std::size_t n_est = bench.estimators().size();
  const std::size_t n_groups = bench.model().size();

  struct Interval {
    bool has = false;
    double lo = 0.0;
    double hi = 0.0;
  };
  const auto flat = parallel_map(cfg.n_obs.size() * reps, cfg.threads, [&](std::size_t i) {
    const std::size_t ni = i / reps;
    const int n = cfg.n_obs[ni];
    const Estimates est = bench.evaluate(bench.draw(n, cfg.seed, stream_id(ni, i % reps)));
    std::vector<Interval> out(n_est * n_groups);
    for (std::size_t e = 0; e < n_est; ++e) {
      for (std::size_t g = 0; g < n_groups; ++g) {
        const GroupEstimate& ge = est[e][g];
        if (!ge.finite()) continue;
        const auto var = plugin ? bench.plugin_variance(e, g, ge) : bench.oracle_variance(e, g);
        if (!var || !(*var >= 0.0) || !std::isfinite(*var)) continue;
        const auto [lo, hi] = confidence_interval(ge.value, *var, n, cfg.level);
        out[e * n_groups + g] = {true, lo, hi};
      }
    }
    return out;
  });

  CoverageResult res;
  for (std::size_t g = 0; g < n_groups; ++g) {
    for (std::size_t e = 0; e < n_est; ++e) {
      for (std::size_t ni = 0; ni < cfg.n_obs.size(); ++ni) {
        CoverageCell cell;
        cell.group = g;
        cell.estimator = bench.estimators()[e];
        cell.n_obs = cfg.n_obs[ni];
        cell.target = bench.target(e, g);
        cell.replications = cfg.replications;
        double width = 0.0;
        int intervals = 0;
        for (std::size_t r = 0; r < reps; ++r) {
          const Interval& iv = flat[ni * reps + r][e * n_groups + g];
          if (!iv.has) {
            ++cell.without_interval;
            continue;
          }
          ++intervals;
          width += iv.hi - iv.lo;
          if (cell.target && iv.lo <= *cell.target && *cell.target <= iv.hi) ++cell.covered;
        }
        cell.mean_width = intervals ? width / intervals : kNaN;
        if (cell.target && bench.oracle_variance(e, g) && std::abs(cell.coverage() - cfg.level) > 0.03) {
          res.passed = false;
        }
        res.cells.push_back(cell);
      }
    }
  }
  return res;
}

EquivalenceResult run_equivalence(const ExperimentConfig& cfg) {
  if (cfg.model.size() == 0) throw DomainError("equivalence needs a [model] with at least one group");
  struct Point {
    std::size_t g;
    GroupSpec group;
    Regime regime;
  };
  std::vector<Point> points;
  for (std::size_t g = 0; g < cfg.model.size(); ++g) {
    const GroupSpec& base = cfg.model[g];
    const Regime regime = coupling_regime(base.beta, cfg.intervals.b1, cfg.intervals.b2);
    if (cfg.equiv_n_pop.empty()) {
      points.push_back({g, base, regime});
    } else {
      for (int n : cfg.equiv_n_pop) {
        points.push_back({g, GroupSpec{base.beta, n, k_for_fraction(n, cfg.equiv_k_fraction)}, regime});
      }
    }
  }

  EquivalenceResult res;
  const std::size_t reps = static_cast<std::size_t>(cfg.replications);
  const int n_obs = cfg.n_obs.front();
  for (std::size_t pi = 0; pi < points.size(); ++pi) {
    const Point& pt = points[pi];
    const ModelSpec single{{pt.group}};
    const RegimeIntervals piv = build_intervals(single, cfg.intervals, IntervalKind::PairScale);
    const RegimeIntervals siv = build_intervals(single, cfg.intervals, IntervalKind::SumScale);
    const EquivalenceConfig ecfg{pt.regime == Regime::High ? cfg.equiv_b_high : cfg.equiv_b_low, std::nullopt};
    const std::vector<GroupSampler> sampler{GroupSampler(pt.group)};

    const auto stats = parallel_map(reps, cfg.threads, [&](std::size_t r) {
      const SumSample s = sample_sums(std::span<const GroupSampler>(sampler), n_obs,
                                      SamplerConfig{cfg.seed, stream_id(pi, r)});
      return std::make_tuple(compute_P(s)[0], compute_T(s)[0], sample_digest(s, 0));
    });
    EquivalenceAudit audit(pt.group, 0, piv, siv, ecfg, pt.regime);
    for (const auto& [p, t, digest] : stats) audit.add(p, t, digest);

    EquivalenceCell cell;
    cell.model_group = pt.g;
    cell.beta = pt.group.beta;
    cell.n_pop = pt.group.n_pop;
    cell.k_obs = pt.group.k_obs;
    cell.b = ecfg.b;
    cell.audit = audit.report();
    if (cell.audit.violations > 0) res.passed = false;
    res.cells.push_back(cell);
  }

  for (std::size_t g = 0; g < cfg.model.size(); ++g) {
    std::vector<double> ns, gaps;
    for (const auto& c : res.cells) {
      if (c.model_group == g && c.audit.regime == Regime::High && c.audit.max_gap > 0.0) {
        ns.push_back(c.n_pop);
        gaps.push_back(c.audit.max_gap);
      }
    }
    if (ns.size() >= 2) res.gap_fits.emplace_back(g, log_log_fit(ns, gaps));
  }
  return res;
}

namespace {

double double_factorial_odd(int k) {
  double r = 1.0;
  for (int i = 2 * k - 1; i > 1; i -= 2) r *= i;
  return r;
}

}  // namespace

ApproxErrorResult run_approx_error(const ExperimentConfig& cfg) {
  const auto& ns = cfg.approx_n_pop;
  const auto& betas = cfg.approx_beta;
  const int k_max = cfg.approx_k_max;

  struct Exact {
    int k_obs;
    double pair;
    std::vector<double> sigma2k;  // index k = 1..k_max
  };
  const auto exact = parallel_map(betas.size() * ns.size(), cfg.threads, [&](std::size_t i) {
    const double beta = betas[i / ns.size()];
    const int n = ns[i % ns.size()];
    const int k = k_for_fraction(n, cfg.approx_alpha);
    const ExactMoments em = exact_moments(n, k, beta, k_max);
    Exact out{k, correlation_moment(n, beta, 2), {0.0}};
    for (int j = 1; j <= k_max; ++j) out.sigma2k.push_back(em.sigma2k(j));
    return out;
  });

  ApproxErrorResult res;
  const double alpha = cfg.approx_alpha.value();
  for (std::size_t bi = 0; bi < betas.size(); ++bi) {
    const double beta = betas[bi];
    const Regime regime = coupling_regime(beta, cfg.intervals.b1, cfg.intervals.b2);
    const double m = regime == Regime::Low ? solve_m(beta) : 0.0;

    auto make_curve = [&](std::string quantity, int order, double power, std::string shape_name) {
      ApproxCurve c;
      c.quantity = std::move(quantity);
      c.order = order;
      c.beta = beta;
      c.regime = regime;
      c.bound_power = power;
      c.shape_name = std::move(shape_name);
      return c;
    };
    std::vector<ApproxCurve> curves;
    if (regime == Regime::High) {
      curves.push_back(make_curve("corr", 2, -2.0, "(ln N/N)^2"));
      for (int j = 1; j <= k_max; ++j) curves.push_back(make_curve("sigma_2k", j, -0.5, "1/sqrt(K)"));
      for (int j = 2; j <= k_max; ++j) curves.push_back(make_curve("sigma_2k_uncorrected", j, -0.5, "1/sqrt(K)"));
    } else {
      curves.push_back(make_curve("corr", 2, -0.5, "(ln N)^1.5/sqrt(N)"));
      for (int j = 1; j <= k_max; ++j) curves.push_back(make_curve("sigma_2k", j, -0.5, "(ln N)^1.5/sqrt(N)"));
    }

    const double f = (1.0 - (1.0 - alpha) * beta) / (1.0 - beta);
    for (std::size_t ni = 0; ni < ns.size(); ++ni) {
      const Exact& ex = exact[bi * ns.size() + ni];
      const double n = ns[ni];
      const double k = ex.k_obs;
      const double low_shape = std::pow(std::log(n), 1.5) / std::sqrt(n);
      for (auto& c : curves) {
        ApproxPoint p;
        p.n_pop = ns[ni];
        p.k_obs = ex.k_obs;
        if (c.quantity == "corr") {
          p.exact = ex.pair;
          p.asymptotic = regime == Regime::High ? beta / ((1.0 - beta) * n) : m * m;
          p.shape = regime == Regime::High ? std::pow(std::log(n) / n, 2) : low_shape;
        } else if (regime == Regime::High) {
          p.exact = ex.sigma2k[c.order] / std::pow(k, c.order);
          const double lead = c.quantity == "sigma_2k" ? double_factorial_odd(c.order) : 1.0;
          p.asymptotic = lead * std::pow(f, c.order);
          p.shape = 1.0 / std::sqrt(k);
        } else {
          p.exact = ex.sigma2k[c.order] / std::pow(k, 2 * c.order);
          p.asymptotic = std::pow(m, 2 * c.order);
          p.shape = low_shape;
        }
        p.error = std::abs(p.exact - p.asymptotic);
        c.max_constant = std::max(c.max_constant, p.implied_constant());
        c.points.push_back(p);
      }
    }
    for (auto& c : curves) {
      std::vector<double> x, y;
      for (const auto& p : c.points) {
        x.push_back(p.n_pop);
        y.push_back(p.error);
      }
      try {
        c.fit = log_log_fit(x, y);
        c.slope_consistent = std::abs(c.fit.slope - c.bound_power) <= 0.25;
      } catch (const DomainError&) {
        c.fit = {kNaN, kNaN, kNaN};
        c.slope_consistent = false;
      }
      if (c.quantity != "sigma_2k_uncorrected" && !c.slope_consistent) res.passed = false;
      res.curves.push_back(std::move(c));
    }
  }
  return res;
}

MlCompareResult run_ml_compare(const ExperimentConfig& cfg) {
  ExperimentConfig local = cfg;
  local.estimators = {"zeta", "ml_oracle"};
  const EstimatorBench bench(local);
  const auto runs = replicate(bench, local);
  MlCompareResult res;
  for (std::size_t g = 0; g < bench.model().size(); ++g) {
    for (std::size_t ni = 0; ni < cfg.n_obs.size(); ++ni) {
      MlCompareCell cell;
      cell.group = g;
      cell.n_obs = cfg.n_obs[ni];
      for (const auto& rep : runs[ni]) {
        const GroupEstimate& z = rep[0][g];
        const GroupEstimate& ml = rep[1][g];
        if (z.finite() && ml.finite()) cell.gaps.push_back(std::abs(z.value - ml.value));
        else ++cell.missing;
      }
      if (!cell.gaps.empty()) {
        cell.gap = quartiles(cell.gaps);
        cell.max_gap = *std::max_element(cell.gaps.begin(), cell.gaps.end());
      } else {
        cell.gap = {kNaN, kNaN, kNaN};
        cell.max_gap = kNaN;
      }
      res.cells.push_back(std::move(cell));
    }
  }
  return res;
}

CalibrateResult run_calibrate(const ExperimentConfig& cfg) {
  CalibrateResult res;
  res.calibrated = calibrate_constants(cfg.calibration);
  res.defaults = cfg.intervals.constants;
  res.defaults_cover = res.defaults.c_high >= res.calibrated.c_high &&
                       res.defaults.c_low >= res.calibrated.c_low &&
                       res.defaults.d_high >= res.calibrated.d_high &&
                       res.defaults.d_low >= res.calibrated.d_low;
  return res;
}

Report to_report(const ConsistencyResult& r) {
  Report rep;
  rep.name = "consistency";
  CsvTable summary({"group", "estimator", "n_obs", "target", "median_abs_err", "q1_abs_err",
                    "q3_abs_err", "iqr_abs_err", "n_finite", "n_minus_inf", "n_plus_inf",
                    "n_undecided", "n_no_information"});
  CsvTable reps({"group", "estimator", "n_obs", "replication", "abs_err"});
  Json cells = Json::array();
  for (const auto& c : r.cells) {
    summary.add_row() << c.group << c.estimator << c.n_obs << opt_text(c.target) << c.error.median
                      << c.error.q1 << c.error.q3 << c.error.iqr() << c.outcomes.finite
                      << c.outcomes.minus_inf << c.outcomes.plus_inf << c.outcomes.undecided
                      << c.outcomes.no_information;
    for (std::size_t i = 0; i < c.abs_errors.size(); ++i) {
      reps.add_row() << c.group << c.estimator << c.n_obs << i << c.abs_errors[i];
    }
    cells.push_back({{"group", c.group},
                     {"estimator", c.estimator},
                     {"n_obs", c.n_obs},
                     {"target", opt_json(c.target)},
                     {"abs_err", quartiles_json(c.error)},
                     {"outcomes", outcomes_json(c.outcomes)}});
  }
  rep.tables.emplace_back("summary", std::move(summary));
  rep.tables.emplace_back("replications", std::move(reps));
  rep.summary["cells"] = std::move(cells);
  rep.summary["assertions"] = {{"medians_non_increasing", r.medians_non_increasing}};
  rep.passed = r.medians_non_increasing;
  return rep;
}

Report to_report(const CltResult& r) {
  Report rep;
  rep.name = "clt";
  CsvTable table({"group", "estimator", "n_obs", "target", "n_finite", "empirical_variance",
                  "formula_variance", "ratio", "ad_a2_star", "ad_critical", "ad_passed"});
  CsvTable cross({"estimator", "n_obs", "group_a", "group_b", "covariance", "std_error", "within_3se"});
  Json cells = Json::array();
  for (const auto& c : r.cells) {
    auto& row = table.add_row();
    row << c.group << c.estimator << c.n_obs << opt_text(c.target) << c.scaled.size()
        << c.empirical_variance << opt_text(c.formula_variance) << opt_text(c.ratio);
    if (c.normality) row << c.normality->a2_star << c.normality->critical << (c.normality->passed ? "true" : "false");
    else row << "" << "" << "";
    Json j = {{"group", c.group},
              {"estimator", c.estimator},
              {"n_obs", c.n_obs},
              {"target", opt_json(c.target)},
              {"outcomes", outcomes_json(c.outcomes)},
              {"empirical_variance", json_number(c.empirical_variance)},
              {"formula_variance", opt_json(c.formula_variance)},
              {"ratio", opt_json(c.ratio)}};
    if (c.normality) {
      j["anderson_darling"] = {{"a2", json_number(c.normality->a2)},
                               {"a2_star", json_number(c.normality->a2_star)},
                               {"critical", c.normality->critical},
                               {"passed", c.normality->passed}};
    }
    cells.push_back(std::move(j));
  }
  Json cj = Json::array();
  for (const auto& c : r.cross) {
    cross.add_row() << c.estimator << c.n_obs << c.group_a << c.group_b << c.covariance << c.std_error
                    << (c.within_3se ? "true" : "false");
    cj.push_back({{"estimator", c.estimator},
                  {"n_obs", c.n_obs},
                  {"group_a", c.group_a},
                  {"group_b", c.group_b},
                  {"covariance", json_number(c.covariance)},
                  {"std_error", json_number(c.std_error)},
                  {"within_3se", c.within_3se}});
  }
  rep.tables.emplace_back("variance", std::move(table));
  rep.tables.emplace_back("cross_covariance", std::move(cross));
  rep.summary["cells"] = std::move(cells);
  rep.summary["cross_covariance"] = std::move(cj);
  rep.summary["assertions"] = {{"variance_normality_diagonal", r.passed}};
  rep.passed = r.passed;
  return rep;
}

Report to_report(const CoverageResult& r) {
  Report rep;
  rep.name = "coverage";
  CsvTable table({"group", "estimator", "n_obs", "target", "replications", "covered",
                  "without_interval", "coverage", "mean_width"});
  Json cells = Json::array();
  for (const auto& c : r.cells) {
    table.add_row() << c.group << c.estimator << c.n_obs << opt_text(c.target) << c.replications
                    << c.covered << c.without_interval << c.coverage() << c.mean_width;
    cells.push_back({{"group", c.group},
                     {"estimator", c.estimator},
                     {"n_obs", c.n_obs},
                     {"target", opt_json(c.target)},
                     {"replications", c.replications},
                     {"covered", c.covered},
                     {"without_interval", c.without_interval},
                     {"coverage", json_number(c.coverage())},
                     {"mean_width", json_number(c.mean_width)}});
  }
  rep.tables.emplace_back("coverage", std::move(table));
  rep.summary["cells"] = std::move(cells);
  rep.summary["assertions"] = {{"coverage_within_3pct", r.passed}};
  rep.passed = r.passed;
  return rep;
}

Report to_report(const EquivalenceResult& r) {
  Report rep;
  rep.name = "equivalence";
  CsvTable table({"model_group", "beta", "n_pop", "k_obs", "regime", "b", "n_samples", "n_in_set",
                  "n_both_minus_inf", "n_marginal", "bound", "max_gap", "violations",
                  "bound_violations", "minus_inf_violations", "identity_violations",
                  "order_violations", "m_sq_violations", "max_m_sq_gap", "marginal_lo", "marginal_hi",
                  "first_violation_digest"});
  Json cells = Json::array();
  for (const auto& c : r.cells) {
    const AuditReport& a = c.audit;
    table.add_row() << c.model_group << c.beta << c.n_pop << c.k_obs << to_string(a.regime) << c.b
                    << a.n_samples << a.n_in_set << a.n_both_minus_inf << a.n_marginal << a.bound
                    << a.max_gap << a.violations << a.bound_violations << a.minus_inf_violations
                    << a.identity_violations << a.order_violations << a.m_sq_violations
                    << a.max_m_sq_gap << a.marginal_band.first << a.marginal_band.second
                    << a.first_violation_digest;
    cells.push_back({{"model_group", c.model_group},
                     {"beta", c.beta},
                     {"n_pop", c.n_pop},
                     {"k_obs", c.k_obs},
                     {"regime", to_string(a.regime)},
                     {"b", c.b},
                     {"n_samples", a.n_samples},
                     {"n_in_set", a.n_in_set},
                     {"bound", json_number(a.bound)},
                     {"max_gap", json_number(a.max_gap)},
                     {"violations", a.violations},
                     {"max_m_sq_gap", json_number(a.max_m_sq_gap)}});
  }
  Json fits = Json::array();
  for (const auto& [g, fit] : r.gap_fits) {
    fits.push_back({{"model_group", g}, {"slope", json_number(fit.slope)}, {"r_squared", json_number(fit.r_squared)}});
  }
  rep.tables.emplace_back("audit", std::move(table));
  rep.summary["cells"] = std::move(cells);
  rep.summary["high_gap_fits"] = std::move(fits);
  rep.summary["assertions"] = {{"zero_violations", r.passed}};
  rep.passed = r.passed;
  return rep;
}

Report to_report(const ApproxErrorResult& r) {
  Report rep;
  rep.name = "approx_error";
  CsvTable points({"quantity", "order", "beta", "regime", "n_pop", "k_obs", "exact", "asymptotic",
                   "error", "shape", "implied_constant"});
  CsvTable fits({"quantity", "order", "beta", "regime", "shape", "bound_power", "slope", "r_squared",
                 "max_constant", "slope_consistent"});
  Json curves = Json::array();
  for (const auto& c : r.curves) {
    for (const auto& p : c.points) {
      points.add_row() << c.quantity << c.order << c.beta << to_string(c.regime) << p.n_pop << p.k_obs
                       << p.exact << p.asymptotic << p.error << p.shape << p.implied_constant();
    }
    fits.add_row() << c.quantity << c.order << c.beta << to_string(c.regime) << c.shape_name
                   << c.bound_power << c.fit.slope << c.fit.r_squared << c.max_constant
                   << (c.slope_consistent ? "true" : "false");
    curves.push_back({{"quantity", c.quantity},
                      {"order", c.order},
                      {"beta", c.beta},
                      {"regime", to_string(c.regime)},
                      {"shape", c.shape_name},
                      {"bound_power", c.bound_power},
                      {"slope", json_number(c.fit.slope)},
                      {"max_constant", json_number(c.max_constant)},
                      {"slope_consistent", c.slope_consistent}});
  }
  rep.tables.emplace_back("points", std::move(points));
  rep.tables.emplace_back("fits", std::move(fits));
  rep.summary["curves"] = std::move(curves);
  rep.summary["assertions"] = {{"slopes_consistent", r.passed}};
  rep.passed = r.passed;
  return rep;
}

Report to_report(const MlCompareResult& r) {
  Report rep;
  rep.name = "ml_compare";
  CsvTable table({"group", "n_obs", "n_compared", "n_missing", "median_gap", "q1_gap", "q3_gap", "max_gap"});
  Json cells = Json::array();
  for (const auto& c : r.cells) {
    table.add_row() << c.group << c.n_obs << c.gaps.size() << c.missing << c.gap.median << c.gap.q1
                    << c.gap.q3 << c.max_gap;
    cells.push_back({{"group", c.group},
                     {"n_obs", c.n_obs},
                     {"n_compared", c.gaps.size()},
                     {"n_missing", c.missing},
                     {"gap", quartiles_json(c.gap)},
                     {"max_gap", json_number(c.max_gap)}});
  }
  rep.tables.emplace_back("gaps", std::move(table));
  rep.summary["cells"] = std::move(cells);
  return rep;
}

Report to_report(const CalibrateResult& r) {
  Report rep;
  rep.name = "calibrate_constants";
  CsvTable table({"constant", "calibrated", "default"});
  table.add_row() << "c_high" << r.calibrated.c_high << r.defaults.c_high;
  table.add_row() << "c_low" << r.calibrated.c_low << r.defaults.c_low;
  table.add_row() << "d_high" << r.calibrated.d_high << r.defaults.d_high;
  table.add_row() << "d_low" << r.calibrated.d_low << r.defaults.d_low;
  rep.tables.emplace_back("constants", std::move(table));
  rep.summary["calibrated"] = {{"c_high", r.calibrated.c_high},
                               {"c_low", r.calibrated.c_low},
                               {"d_high", r.calibrated.d_high},
                               {"d_low", r.calibrated.d_low}};
  rep.summary["assertions"] = {{"defaults_cover_calibration", r.defaults_cover}};
  rep.passed = r.defaults_cover;
  return rep;
}

Report run_sample(const ExperimentConfig& cfg) {
  if (cfg.model.size() == 0) throw DomainError("sample needs a [model] with at least one group");
  const int n = cfg.n_obs.front();
  const SampleMatrix sample = sample_multigroup(cfg.model, n, SamplerConfig{cfg.seed, 0});
  std::filesystem::create_directories(cfg.out_dir);
  const std::string path = (std::filesystem::path(cfg.out_dir) / "sample.csv").string();
  write_csv(sample, path);

  Report rep;
  rep.name = "sample";
  const StatisticVector t = compute_T(sample);
  Json groups = Json::array();
  for (std::size_t g = 0; g < cfg.model.size(); ++g) {
    groups.push_back({{"group", g},
                      {"beta", cfg.model[g].beta},
                      {"n_pop", cfg.model[g].n_pop},
                      {"k_obs", cfg.model[g].k_obs},
                      {"T", json_number(t[g].value)}});
  }
  rep.summary["n_obs"] = n;
  rep.summary["file"] = "sample.csv";
  rep.summary["groups"] = std::move(groups);
  return rep;
}

Report run_estimate(const ExperimentConfig& cfg) {
  if (cfg.input.empty()) throw DomainError("estimate needs [estimate] input");
  const SampleMatrix sample = ingest_csv(cfg.input, CsvOptions{cfg.zero_one});
  if (sample.n_groups() != cfg.model.size()) {
    throw DomainError("input has " + std::to_string(sample.n_groups()) + " groups, config has " +
                      std::to_string(cfg.model.size()));
  }
  for (std::size_t g = 0; g < cfg.model.size(); ++g) {
    if (sample.k_obs[g] != cfg.model[g].k_obs) {
      throw DomainError("group " + std::to_string(g) + " has " + std::to_string(sample.k_obs[g]) +
                        " observed columns, config says " + std::to_string(cfg.model[g].k_obs));
    }
  }
  const SumSample sums = row_sums(sample);
  const EstimatorBench bench(cfg);
  const auto est = bench.evaluate(sums);

  Report rep;
  rep.name = "estimate";
  CsvTable table({"group", "estimator", "outcome", "regime", "value", "variance", "ci_lo", "ci_hi", "diagnostic"});
  Json rows = Json::array();
  for (std::size_t e = 0; e < bench.estimators().size(); ++e) {
    for (std::size_t g = 0; g < cfg.model.size(); ++g) {
      const GroupEstimate& ge = est[e][g];
      const auto var = bench.plugin_variance(e, g, ge);
      std::optional<std::pair<double, double>> ci;
      if (var && std::isfinite(*var) && *var >= 0.0) ci = confidence_interval(ge.value, *var, sums.n_obs, cfg.level);
      table.add_row() << g << bench.estimators()[e] << to_string(ge.outcome) << to_string(ge.regime)
                      << ge.value << opt_text(var) << (ci ? format_double(ci->first) : "")
                      << (ci ? format_double(ci->second) : "") << ge.diagnostic;
      Json j = {{"group", g},
                {"estimator", bench.estimators()[e]},
                {"outcome", to_string(ge.outcome)},
                {"regime", to_string(ge.regime)},
                {"value", json_number(ge.value)},
                {"variance", opt_json(var)}};
      if (ci) j["ci"] = {json_number(ci->first), json_number(ci->second)};
      rows.push_back(std::move(j));
    }
  }
  rep.tables.emplace_back("estimates", std::move(table));
  rep.summary["n_obs"] = sums.n_obs;
  rep.summary["estimates"] = std::move(rows);
  return rep;
}

Report run_experiment(const ExperimentConfig& cfg) {
  switch (cfg.kind) {
    case ExperimentKind::Sample: return run_sample(cfg);
    case ExperimentKind::Estimate: return run_estimate(cfg);
    case ExperimentKind::Consistency: return to_report(run_consistency(cfg));
    case ExperimentKind::Clt: return to_report(run_clt(cfg));
    case ExperimentKind::Coverage: return to_report(run_coverage(cfg));
    case ExperimentKind::Equivalence: return to_report(run_equivalence(cfg));
    case ExperimentKind::ApproxError: return to_report(run_approx_error(cfg));
    case ExperimentKind::MlCompare: return to_report(run_ml_compare(cfg));
    case ExperimentKind::Calibrate: return to_report(run_calibrate(cfg));
  }
  throw DomainError("unknown experiment kind");
}

}  // namespace cwsubset::harness
