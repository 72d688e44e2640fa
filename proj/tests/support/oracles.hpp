#pragma once

// Reference computations that avoid the library's sector decomposition.

#include <cmath>
#include <cstdint>
#include <vector>

namespace oracle {

struct BruteMoments {
  double z = 0.0;
  double e_s2 = 0.0;
  double e_s4 = 0.0;
  double e_sigma2 = 0.0;
  double e_sigma4 = 0.0;
  double e_x1x2 = 0.0;
};

// Sums the Gibbs weight exp(beta S^2 / (2N)) over all 2^N configurations;
// the observed spins are the first k.
inline BruteMoments enumerate(int n, int k, double beta) {
  BruteMoments out;
  double s2 = 0, s4 = 0, g2 = 0, g4 = 0, pair = 0;
  for (std::uint32_t cfg = 0; cfg < (1u << n); ++cfg) {
    int s = 0;
    int sigma = 0;
    int x[2] = {0, 0};
    for (int i = 0; i < n; ++i) {
      const int xi = (cfg >> i) & 1u ? 1 : -1;
      s += xi;
      if (i < k) sigma += xi;
      if (i < 2) x[i] = xi;
    }
    const double w = std::exp(beta * s * s / (2.0 * n));
    out.z += w;
    s2 += w * s * s;
    s4 += w * std::pow(s, 4);
    g2 += w * sigma * sigma;
    g4 += w * std::pow(sigma, 4);
    if (n >= 2) pair += w * x[0] * x[1];
  }
  out.e_s2 = s2 / out.z;
  out.e_s4 = s4 / out.z;
  out.e_sigma2 = g2 / out.z;
  out.e_sigma4 = g4 / out.z;
  out.e_x1x2 = pair / out.z;
  return out;
}

// Plain bisection on tanh(beta x) - x over [lo, 1].
inline double m_bisect(double beta, double lo = 1e-9) {
  double a = lo, b = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (a + b);
    if (std::tanh(beta * mid) - mid > 0) a = mid; else b = mid;
  }
  return 0.5 * (a + b);
}

// Mean over ordered pairs i != j of x_i x_j, summed pair by pair.
inline double pair_sum(const std::vector<std::vector<int>>& rows) {
  double acc = 0.0;
  for (const auto& r : rows) {
    const int k = static_cast<int>(r.size());
    double row = 0.0;
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        if (i != j) row += r[i] * r[j];
    acc += row / (static_cast<double>(k) * (k - 1));
  }
  return acc / rows.size();
}

inline bool rel_close(double a, double b, double rel, double abs_floor = 0.0) {
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b)) + abs_floor;
}

}  // namespace oracle
