#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cwsubset/sampler.hpp"

namespace cwsubset {

enum class StatisticKind { PairCorrelation, SquaredSum };

struct GroupStatistic {
  double value = 0.0;
  int n_obs = 0;
  int k_obs = 0;
  // Exact sum over rows of the squared row sum the value was formed from.
  std::int64_t sum_sq = 0;
};

struct StatisticVector {
  StatisticKind kind = StatisticKind::SquaredSum;
  std::vector<GroupStatistic> groups;

  std::size_t size() const { return groups.size(); }
  const GroupStatistic& operator[](std::size_t g) const { return groups[g]; }
};

// Mean of x_i x_j over ordered pairs i != j, via ((row sum)^2 - K) / (K(K-1)).
// Throws DomainError if some group has k_obs < 2.
StatisticVector compute_P(const SumSample& sums);
StatisticVector compute_P(const SampleMatrix& sample);

// Mean squared row sum.
StatisticVector compute_T(const SumSample& sums);
StatisticVector compute_T(const SampleMatrix& sample);

// Mean of x_1 x_2 over rows, using only the first two observed spins.
StatisticVector compute_P2(const SumSample& sums);

// Exact finite-N statistics derived from a single integer sum. Used by the
// enumeration tests and the CLI.
GroupStatistic pair_statistic(std::int64_t sum_sq, int n_obs, int k_obs);
GroupStatistic squared_sum_statistic(std::int64_t sum_sq, int n_obs, int k_obs);

struct CsvOptions {
  // Accept {0, 1} entries and map 0 to -1.
  bool zero_one = false;
};

// Reads the CSV written by write_csv. Malformed structure raises ParseError
// with line and column; entries outside {-1, +1} raise DomainError naming
// the row and column.
SampleMatrix ingest_csv(const std::string& path, const CsvOptions& options = {});
SampleMatrix parse_csv(const std::string& text, const CsvOptions& options = {});

}  // namespace cwsubset
