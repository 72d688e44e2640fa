#pragma once

#include <vector>

#include "cwsubset/model.hpp"

namespace cwsubset {

enum class IntervalKind { PairScale, SumScale };
enum class Regime { High, Critical, Low };

const char* to_string(Regime r);
const char* to_string(IntervalKind k);

// Defaults come from calibrate_constants() with the settings in
// CalibrationSettings{} and are rounded up.
struct IntervalConstants {
  double c_high = 4.22;
  double c_low = 0.116;
  double d_high = 3.07;
  double d_low = 0.078;
};

struct IntervalParams {
  double b1 = 0.8;
  double b2 = 1.2;
  IntervalConstants constants;
};

// Statistic bands of one group. The high band is [floor, high_upper]
// (closed on the right), the critical band (high_upper, low_lower) is open
// and the low band starts at low_lower (closed on the left).
struct GroupIntervals {
  int n_pop = 0;
  int k_obs = 0;
  double alpha = 0.0;
  double high_upper = 0.0;
  double low_lower = 0.0;

  Regime classify(double statistic) const;
};

struct RegimeIntervals {
  IntervalKind kind = IntervalKind::PairScale;
  IntervalParams params;
  std::vector<GroupIntervals> groups;

  const GroupIntervals& operator[](std::size_t g) const { return groups[g]; }
};

// Pair scale: J_h upper b1/((1-b1)N) + C_high (ln N/N)^2,
//             J_l lower m(b2)^2 - C_low (ln N)^{3/2}/sqrt(N).
// Sum scale:  J_h upper (1-(1-a) b1)/(1-b1) K + D_high sqrt(K),
//             J_l lower (m(b2)^2 - D_low (ln N)^{3/2}/sqrt(N)) K^2.
// `alpha` holds one observed fraction per group (sum scale only); empty
// means k_obs / n_pop. Throws SeparationViolated when the bands touch.
RegimeIntervals build_intervals(const ModelSpec& spec, const IntervalParams& params,
                                IntervalKind kind, const std::vector<Fraction>& alpha = {});

// Regime of the true coupling: High on beta <= b1, Low on beta >= b2.
// Throws DomainError inside (b1, b2).
Regime coupling_regime(double beta, double b1, double b2);

struct CalibrationSettings {
  double b1 = 0.8;
  double b2 = 1.2;
  double alpha = 0.5;
  int n_min = 10;
  int n_max = 400;
  int n_step = 10;
  int beta_points = 9;
  double low_span = 3.0;
};

// Largest ratio |exact - asymptotic| / bound shape over an exact-moment
// sweep: beta on an even grid of [0, b1] resp. [b2, b2 + low_span], N on
// the given grid and K = round(alpha N).
IntervalConstants calibrate_constants(const CalibrationSettings& settings = {});

}  // namespace cwsubset
