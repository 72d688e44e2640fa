#include "cwsubset/curie_weiss.hpp"

#include <cmath>
#include <string>

#include "cwsubset/errors.hpp"

namespace cwsubset {

namespace {

constexpr double kBracketLow = 1e-12;
constexpr double kBisectionWidth = 1e-13;

}  // namespace

double solve_m(double beta) {
  if (!(beta >= 1.0)) {
    throw DomainError("solve_m: beta must be >= 1, got " + std::to_string(beta));
  }
  if (beta == 1.0) return 0.0;

  auto g = [beta](double x) { return std::tanh(beta * x) - x; };

  double lo = kBracketLow;
  double hi = 1.0;
  // Root closer to zero than the bracket can resolve.
  if (g(lo) <= 0.0) return 0.0;

  while (hi - lo > kBisectionWidth) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (g(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }

  double x = 0.5 * (lo + hi);
  for (int step = 0; step < 2; ++step) {
    const double t = std::tanh(beta * x);
    const double slope = beta * (1.0 - t * t) - 1.0;
    if (slope == 0.0) break;
    const double next = x - (t - x) / slope;
    if (!(next >= lo && next <= hi)) break;
    x = next;
  }
  return x;
}

double m_prime(double beta) {
  if (!(beta > 1.0)) {
    throw DomainError("m_prime: beta must be > 1, got " + std::to_string(beta));
  }
  const double m = solve_m(beta);
  const double m2 = m * m;
  // 1 - beta (1 - m^2), rearranged to avoid cancelling two O(1) terms.
  const double denom = beta * m2 - (beta - 1.0);
  if (!(m > 0.0) || !(denom > 0.0)) {
    throw DomainError("m_prime: derivative diverges at beta = " + std::to_string(beta));
  }
  return m * (1.0 - m2) / denom;
}

double m_inverse(double y) {
  if (!(y > 0.0 && y < 1.0)) {
    throw DomainError("m_inverse: argument must lie in (0, 1), got " + std::to_string(y));
  }
  if (y < 1e-4) {
    const double y2 = y * y;
    return 1.0 + y2 * (1.0 / 3.0 + y2 * (1.0 / 5.0 + y2 / 7.0));
  }
  return std::atanh(y) / y;
}

}  // namespace cwsubset
