#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cwsubset/magnetization.hpp"
#include "cwsubset/model.hpp"
#include "cwsubset/philox.hpp"

namespace cwsubset {

struct SamplerConfig {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
};

// Cap on stored hypergeometric table entries per group sampler.
inline constexpr std::size_t kDefaultTableBudget = std::size_t{1} << 26;

// n_obs observations of the observed spins of every group. Columns of
// group g occupy [group_offsets[g], group_offsets[g + 1]).
struct SampleMatrix {
  int n_obs = 0;
  std::vector<int> k_obs;
  std::vector<std::size_t> group_offsets{0};
  std::vector<std::int8_t> data;  // row-major, entries -1 / +1

  std::size_t n_groups() const { return k_obs.size(); }
  std::size_t n_cols() const { return group_offsets.back(); }
  std::int8_t at(int row, std::size_t col) const { return data[row * n_cols() + col]; }
  std::span<const std::int8_t> row(int t) const {
    return {data.data() + t * n_cols(), n_cols()};
  }
  std::span<const std::int8_t> group_row(int t, std::size_t g) const {
    return {data.data() + t * n_cols() + group_offsets[g], static_cast<std::size_t>(k_obs[g])};
  }

  bool operator==(const SampleMatrix&) const = default;
};

// Per-row sums of one group: over all K observed spins, and over the first
// min(K, 2) of them.
struct GroupSums {
  int k_obs = 0;
  std::vector<std::int32_t> sigma;
  std::vector<std::int32_t> sigma_pair;
};

struct SumSample {
  int n_obs = 0;
  std::vector<GroupSums> groups;
};

SumSample row_sums(const SampleMatrix& sample);

// Exact two-stage sampler for the observed spins of one group: draws the
// sector of S by inverse CDF, then the number H of observed plus spins by
// inverse CDF over the sector's hypergeometric law, then places them.
//
// Row t of lane g under (seed, stream_id) uses key (seed, stream_id) and
// counters (*, t, g, 0) for the sector, H and the first two positions and
// (*, t, g, 1) for placing the rest. Spin and sum paths consume the same
// draws.
// Immutable after construction; share freely between threads.
class GroupSampler {
 public:
  explicit GroupSampler(const GroupSpec& group, std::size_t table_budget = kDefaultTableBudget);

  const GroupSpec& group() const { return group_; }
  const MagnetizationDistribution& magnetization() const { return dist_; }

  // Writes k_obs spins of row t into `out`.
  void draw_row(const SamplerConfig& cfg, std::uint64_t lane, std::uint64_t t,
                std::span<std::int8_t> out, std::vector<int>& scratch) const;

  // Sum-only draw of row t: (Sigma_K, Sigma over the first two).
  std::pair<int, int> draw_row_sums(const SamplerConfig& cfg, std::uint64_t lane,
                                    std::uint64_t t) const;

 private:
  struct RowDraw {
    int plus_total;  // H
    int plus_head;   // plus spins among the first min(K, 2)
    bool head_plus_first;
  };
  RowDraw draw_head(const SamplerConfig& cfg, std::uint64_t lane, std::uint64_t t) const;

  GroupSpec group_;
  MagnetizationDistribution dist_;
  std::vector<std::size_t> table_offset_;  // per sector, into table_cdf_
  std::vector<int> table_lo_;
  std::vector<double> table_cdf_;
};

SampleMatrix sample_subset(const GroupSpec& group, int n_obs, const SamplerConfig& cfg,
                           std::uint64_t lane = 0);
SampleMatrix sample_full(const GroupSpec& group, int n_obs, const SamplerConfig& cfg,
                         std::uint64_t lane = 0);
// Group g uses lane g.
SampleMatrix sample_multigroup(const ModelSpec& spec, int n_obs, const SamplerConfig& cfg);

SumSample sample_sums(std::span<const GroupSampler> samplers, int n_obs, const SamplerConfig& cfg);
SumSample sample_sums(const ModelSpec& spec, int n_obs, const SamplerConfig& cfg);

// CSV with header "g:i,..." and one +-1 row per observation.
void write_csv(const SampleMatrix& sample, const std::string& path);

}  // namespace cwsubset
