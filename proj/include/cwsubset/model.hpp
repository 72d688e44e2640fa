#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace cwsubset {

// One non-interacting group: coupling, population size and the number of
// observed voters.
struct GroupSpec {
  double beta = 0.0;
  int n_pop = 1;
  int k_obs = 1;

  // Finite-population stand-in for the observed fraction.
  double observed_fraction() const { return static_cast<double>(k_obs) / n_pop; }
};

struct ModelSpec {
  std::vector<GroupSpec> groups;

  std::size_t size() const { return groups.size(); }
  const GroupSpec& operator[](std::size_t i) const { return groups[i]; }
};

// Throws DomainError unless 1 <= k_obs <= n_pop.
void validate(const GroupSpec& group);
void validate(const ModelSpec& spec);

}  // namespace cwsubset

namespace cwsubset {

// Non-negative rational observed fraction. Thresholds against integer sums
// are compared exactly.
struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool operator==(const Fraction&) const = default;
};

// k_obs / n_pop.
inline Fraction observed_fraction(const GroupSpec& g) { return {g.k_obs, g.n_pop}; }

// Accepts "p/q", an integer, or a plain decimal such as "0.375". The result
// is in lowest terms.
// Throws DomainError on malformed input or a value outside [0, 1].
Fraction parse_fraction(std::string_view text);

}  // namespace cwsubset
