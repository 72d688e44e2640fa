#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cwsubset/equivalence.hpp"
#include "cwsubset/estimators.hpp"
#include "cwsubset/harness/config.hpp"
#include "cwsubset/harness/report.hpp"
#include "cwsubset/harness/summary.hpp"
#include "cwsubset/intervals.hpp"
#include "cwsubset/sampler.hpp"

namespace cwsubset::harness {

// Stream of replication `rep` at grid point `grid`.
inline std::uint64_t stream_id(std::uint64_t grid, std::uint64_t rep) { return (grid << 32) | rep; }

// Everything needed to turn one sample into estimates for every configured
// estimator and group: samplers, interval systems and finite-N targets.
class EstimatorBench {
 public:
  explicit EstimatorBench(const ExperimentConfig& cfg);

  const ModelSpec& model() const { return model_; }
  const std::vector<std::string>& estimators() const { return estimators_; }
  const std::vector<GroupSampler>& samplers() const { return samplers_; }
  Fraction alpha(std::size_t g) const;

  // [estimator][group]
  std::vector<std::vector<GroupEstimate>> evaluate(const SumSample& sample) const;
  SumSample draw(int n_obs, std::uint64_t seed, std::uint64_t stream) const;

  // Target of estimator e for group g: gamma~ / zeta~ at the true coupling,
  // the coupling itself for ml_oracle. Empty when undefined.
  std::optional<double> target(std::size_t e, std::size_t g) const;
  // Asymptotic variance at the true coupling; empty when no formula applies.
  std::optional<double> oracle_variance(std::size_t e, std::size_t g) const;
  // Asymptotic variance with the coupling replaced by the estimate and the
  // regime taken from the band the statistic fell in.
  std::optional<double> plugin_variance(std::size_t e, std::size_t g, const GroupEstimate& est) const;

  const RegimeIntervals& pair_intervals() const { return pair_iv_; }
  const RegimeIntervals& sum_intervals() const { return sum_iv_; }

 private:
  GroupSpec estimator_group(std::size_t e, std::size_t g) const;

  ModelSpec model_;
  std::vector<Fraction> alpha_;
  IntervalParams params_;
  std::vector<std::string> estimators_;
  std::pair<double, double> ml_bracket_;
  std::vector<GroupSampler> samplers_;
  RegimeIntervals pair_iv_;
  RegimeIntervals sum_iv_;
  std::vector<std::vector<std::optional<TargetParams>>> targets_;  // [estimator][group]
};

struct OutcomeCounts {
  int finite = 0;
  int minus_inf = 0;
  int plus_inf = 0;
  int undecided = 0;
  int no_information = 0;
  void add(Outcome o);
};

struct ConsistencyCell {
  std::size_t group = 0;
  std::string estimator;
  int n_obs = 0;
  std::optional<double> target;
  // |estimate - target| per replication; +inf for non-finite outcomes.
  std::vector<double> abs_errors;
  Quartiles error;
  OutcomeCounts outcomes;
};

struct ConsistencyResult {
  std::vector<ConsistencyCell> cells;  // ordered by group, estimator, n
  bool medians_non_increasing = true;
};

struct CltCell {
  std::size_t group = 0;
  std::string estimator;
  int n_obs = 0;
  std::optional<double> target;
  std::vector<double> scaled;  // sqrt(n)(estimate - target) of finite replications
  OutcomeCounts outcomes;
  double empirical_variance = 0.0;
  std::optional<double> formula_variance;
  std::optional<double> ratio;
  std::optional<NormalityTest> normality;
};

struct CrossCovariance {
  std::string estimator;
  int n_obs = 0;
  std::size_t group_a = 0;
  std::size_t group_b = 0;
  double covariance = 0.0;
  // Standard error of the sample covariance under independence.
  double std_error = 0.0;
  bool within_3se = true;
};

struct CltResult {
  std::vector<CltCell> cells;
  std::vector<CrossCovariance> cross;
  bool passed = true;
};

struct CoverageCell {
  std::size_t group = 0;
  std::string estimator;
  int n_obs = 0;
  std::optional<double> target;
  int replications = 0;
  int covered = 0;
  int without_interval = 0;
  double mean_width = 0.0;
  double coverage() const { return replications ? static_cast<double>(covered) / replications : 0.0; }
};

struct CoverageResult {
  std::vector<CoverageCell> cells;
  bool passed = true;
};

struct EquivalenceCell {
  std::size_t model_group = 0;
  double beta = 0.0;
  int n_pop = 0;
  int k_obs = 0;
  double b = 0.0;
  AuditReport audit;
};

struct EquivalenceResult {
  std::vector<EquivalenceCell> cells;
  // Log-log slope of the high-case max gap against N, per model group.
  std::vector<std::pair<std::size_t, PowerFit>> gap_fits;
  bool passed = true;
};

struct ApproxPoint {
  int n_pop = 0;
  int k_obs = 0;
  double exact = 0.0;
  double asymptotic = 0.0;
  double error = 0.0;
  double shape = 0.0;
  double implied_constant() const { return shape > 0.0 ? error / shape : 0.0; }
};

struct ApproxCurve {
  std::string quantity;  // "corr_k" or "sigma_2k"
  int order = 0;
  double beta = 0.0;
  Regime regime = Regime::High;
  // Exponent of N in the leading power of the bound shape.
  double bound_power = 0.0;
  std::string shape_name;
  std::vector<ApproxPoint> points;
  PowerFit fit;
  double max_constant = 0.0;
  bool slope_consistent = false;
};

struct ApproxErrorResult {
  std::vector<ApproxCurve> curves;
  bool passed = true;
};

struct MlCompareCell {
  std::size_t group = 0;
  int n_obs = 0;
  std::vector<double> gaps;  // |zeta_hat - root| where both exist
  int missing = 0;
  Quartiles gap;
  double max_gap = 0.0;
};

struct MlCompareResult {
  std::vector<MlCompareCell> cells;
};

struct CalibrateResult {
  IntervalConstants calibrated;
  IntervalConstants defaults;
  bool defaults_cover = true;
};

ConsistencyResult run_consistency(const ExperimentConfig& cfg);
CltResult run_clt(const ExperimentConfig& cfg);
CoverageResult run_coverage(const ExperimentConfig& cfg);
EquivalenceResult run_equivalence(const ExperimentConfig& cfg);
ApproxErrorResult run_approx_error(const ExperimentConfig& cfg);
MlCompareResult run_ml_compare(const ExperimentConfig& cfg);
CalibrateResult run_calibrate(const ExperimentConfig& cfg);

Report to_report(const ConsistencyResult& r);
Report to_report(const CltResult& r);
Report to_report(const CoverageResult& r);
Report to_report(const EquivalenceResult& r);
Report to_report(const ApproxErrorResult& r);
Report to_report(const MlCompareResult& r);
Report to_report(const CalibrateResult& r);

// Draws one multi-group sample and writes it as CSV to <out>/sample.csv.
Report run_sample(const ExperimentConfig& cfg);
// Estimates every configured estimator from the CSV at cfg.input.
Report run_estimate(const ExperimentConfig& cfg);

// Dispatches on cfg.kind.
Report run_experiment(const ExperimentConfig& cfg);

}  // namespace cwsubset::harness
