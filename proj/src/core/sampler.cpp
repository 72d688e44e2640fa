#include "cwsubset/sampler.hpp"

#include <algorithm>
#include <fstream>
#include <string>

#include "cwsubset/errors.hpp"

namespace cwsubset {

namespace {

constexpr std::uint64_t kPurposeHead = 0;
constexpr std::uint64_t kPurposePlacement = 1;

PhiloxKey key_of(const SamplerConfig& cfg) { return {cfg.seed, cfg.stream_id}; }

// Index of the first entry of `cdf` strictly greater than u.
std::size_t invert(std::span<const double> cdf, double u) {
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  if (it == cdf.end()) return cdf.size() - 1;
  return static_cast<std::size_t>(it - cdf.begin());
}

}  // namespace

GroupSampler::GroupSampler(const GroupSpec& group, std::size_t table_budget)
    : group_(group), dist_((validate(group), group.n_pop), group.beta) {
  const int n = group.n_pop;
  const int k = group.k_obs;
  table_offset_.resize(n + 2, 0);
  table_lo_.resize(n + 1, 0);
  std::size_t total = 0;
  for (int a = 0; a <= n; ++a) {
    const int lo = std::max(0, k - (n - a));
    const int hi = std::min(k, a);
    total += static_cast<std::size_t>(hi - lo + 1);
  }
  if (total > table_budget) {
    throw ResourceError("hypergeometric tables need " + std::to_string(total) +
                        " entries, budget is " + std::to_string(table_budget));
  }
  table_cdf_.reserve(total);
  for (int a = 0; a <= n; ++a) {
    table_offset_[a] = table_cdf_.size();
    const HypergeometricPmf hyp = hypergeometric_pmf(n, a, k);
    table_lo_[a] = hyp.lo;
    double run = 0.0;
    for (double p : hyp.pmf) {
      run += p;
      table_cdf_.push_back(run);
    }
    table_cdf_.back() = 1.0;
  }
  table_offset_[n + 1] = table_cdf_.size();
}

GroupSampler::RowDraw GroupSampler::draw_head(const SamplerConfig& cfg, std::uint64_t lane,
                                              std::uint64_t t) const {
  PhiloxStream rng(key_of(cfg), t, lane, kPurposeHead);
  const double u_sector = to_unit(rng.next());
  const double u_plus = to_unit(rng.next());

  const int a = static_cast<int>(invert(dist_.cdf(), u_sector));
  const std::span<const double> cdf(table_cdf_.data() + table_offset_[a],
                                    table_offset_[a + 1] - table_offset_[a]);
  const int h = table_lo_[a] + static_cast<int>(invert(cdf, u_plus));

  const std::uint64_t k = group_.k_obs;
  RowDraw out{h, h, true};
  if (k >= 2) {
    // Plus spins among the first two observed: hypergeometric(K, H, 2),
    // drawn exactly on the integer scale K(K-1).
    const std::uint64_t hh = h;
    const std::uint64_t r = rng.below(k * (k - 1));
    const std::uint64_t both_minus = (k - hh) * (k - hh - 1);
    const std::uint64_t mixed = 2 * hh * (k - hh);
    if (r < both_minus) {
      out.plus_head = 0;
    } else if (r < both_minus + mixed) {
      out.plus_head = 1;
      out.head_plus_first = rng.below(2) == 0;
    } else {
      out.plus_head = 2;
    }
  }
  return out;
}

std::pair<int, int> GroupSampler::draw_row_sums(const SamplerConfig& cfg, std::uint64_t lane,
                                                std::uint64_t t) const {
  const RowDraw d = draw_head(cfg, lane, t);
  const int k = group_.k_obs;
  const int head = std::min(k, 2);
  return {2 * d.plus_total - k, 2 * d.plus_head - head};
}

void GroupSampler::draw_row(const SamplerConfig& cfg, std::uint64_t lane, std::uint64_t t,
                            std::span<std::int8_t> out, std::vector<int>& scratch) const {
  const RowDraw d = draw_head(cfg, lane, t);
  const int k = group_.k_obs;
  if (k == 1) {
    out[0] = d.plus_total == 1 ? 1 : -1;
    return;
  }
  if (d.plus_head == 1) {
    out[0] = d.head_plus_first ? 1 : -1;
    out[1] = d.head_plus_first ? -1 : 1;
  } else {
    out[0] = out[1] = d.plus_head == 2 ? 1 : -1;
  }

  // Remaining plus spins uniformly among positions 2..K-1 by a partial
  // Fisher-Yates shuffle over the smaller of the two colour classes.
  const int tail = k - 2;
  const int plus_tail = d.plus_total - d.plus_head;
  const bool mark_plus = plus_tail <= tail - plus_tail;
  const int marks = mark_plus ? plus_tail : tail - plus_tail;
  const std::int8_t base = mark_plus ? -1 : 1;
  std::fill(out.begin() + 2, out.end(), base);
  if (marks == 0) return;

  scratch.resize(tail);
  for (int i = 0; i < tail; ++i) scratch[i] = i;
  PhiloxStream rng(key_of(cfg), t, lane, kPurposePlacement);
  for (int i = 0; i < marks; ++i) {
    const int j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(tail - i)));
    std::swap(scratch[i], scratch[j]);
    out[2 + scratch[i]] = static_cast<std::int8_t>(-base);
  }
}

namespace {

SampleMatrix make_matrix(std::span<const int> k_obs, int n_obs) {
  SampleMatrix m;
  m.n_obs = n_obs;
  m.k_obs.assign(k_obs.begin(), k_obs.end());
  for (int k : k_obs) m.group_offsets.push_back(m.group_offsets.back() + k);
  m.data.assign(static_cast<std::size_t>(n_obs) * m.n_cols(), 0);
  return m;
}

void fill_group(SampleMatrix& m, std::size_t g, const GroupSampler& sampler,
                const SamplerConfig& cfg, std::uint64_t lane) {
  std::vector<int> scratch;
  const std::size_t k = m.k_obs[g];
  for (int t = 0; t < m.n_obs; ++t) {
    std::span<std::int8_t> out(m.data.data() + t * m.n_cols() + m.group_offsets[g], k);
    sampler.draw_row(cfg, lane, static_cast<std::uint64_t>(t), out, scratch);
  }
}

}  // namespace

SampleMatrix sample_subset(const GroupSpec& group, int n_obs, const SamplerConfig& cfg,
                           std::uint64_t lane) {
  if (n_obs < 0) throw DomainError("n_obs must be non-negative");
  const GroupSampler sampler(group);
  const int k = group.k_obs;
  SampleMatrix m = make_matrix(std::span<const int>(&k, 1), n_obs);
  fill_group(m, 0, sampler, cfg, lane);
  return m;
}

SampleMatrix sample_full(const GroupSpec& group, int n_obs, const SamplerConfig& cfg,
                         std::uint64_t lane) {
  GroupSpec full = group;
  full.k_obs = group.n_pop;
  return sample_subset(full, n_obs, cfg, lane);
}

SampleMatrix sample_multigroup(const ModelSpec& spec, int n_obs, const SamplerConfig& cfg) {
  validate(spec);
  if (n_obs < 0) throw DomainError("n_obs must be non-negative");
  std::vector<int> ks;
  for (const auto& g : spec.groups) ks.push_back(g.k_obs);
  SampleMatrix m = make_matrix(ks, n_obs);
  for (std::size_t g = 0; g < spec.size(); ++g) {
    fill_group(m, g, GroupSampler(spec[g]), cfg, g);
  }
  return m;
}

SumSample sample_sums(std::span<const GroupSampler> samplers, int n_obs,
                      const SamplerConfig& cfg) {
  if (n_obs < 0) throw DomainError("n_obs must be non-negative");
  SumSample out;
  out.n_obs = n_obs;
  out.groups.resize(samplers.size());
  for (std::size_t g = 0; g < samplers.size(); ++g) {
    GroupSums& gs = out.groups[g];
    gs.k_obs = samplers[g].group().k_obs;
    gs.sigma.resize(n_obs);
    gs.sigma_pair.resize(n_obs);
    for (int t = 0; t < n_obs; ++t) {
      const auto [sig, pair] = samplers[g].draw_row_sums(cfg, g, static_cast<std::uint64_t>(t));
      gs.sigma[t] = sig;
      gs.sigma_pair[t] = pair;
    }
  }
  return out;
}

SumSample sample_sums(const ModelSpec& spec, int n_obs, const SamplerConfig& cfg) {
  validate(spec);
  std::vector<GroupSampler> samplers;
  samplers.reserve(spec.size());
  for (const auto& g : spec.groups) samplers.emplace_back(g);
  return sample_sums(samplers, n_obs, cfg);
}

SumSample row_sums(const SampleMatrix& sample) {
  SumSample out;
  out.n_obs = sample.n_obs;
  out.groups.resize(sample.n_groups());
  for (std::size_t g = 0; g < sample.n_groups(); ++g) {
    GroupSums& gs = out.groups[g];
    gs.k_obs = sample.k_obs[g];
    gs.sigma.resize(sample.n_obs);
    gs.sigma_pair.resize(sample.n_obs);
    for (int t = 0; t < sample.n_obs; ++t) {
      const auto row = sample.group_row(t, g);
      int sig = 0;
      for (auto x : row) sig += x;
      int pair = 0;
      for (std::size_t i = 0; i < std::min<std::size_t>(2, row.size()); ++i) pair += row[i];
      gs.sigma[t] = sig;
      gs.sigma_pair[t] = pair;
    }
  }
  return out;
}

void write_csv(const SampleMatrix& sample, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  for (std::size_t g = 0; g < sample.n_groups(); ++g) {
    for (int i = 0; i < sample.k_obs[g]; ++i) {
      if (g > 0 || i > 0) os << ',';
      os << g << ':' << i;
    }
  }
  os << '\n';
  for (int t = 0; t < sample.n_obs; ++t) {
    const auto row = sample.row(t);
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) os << ',';
      os << static_cast<int>(row[c]);
    }
    os << '\n';
  }
  if (!os) throw std::runtime_error("write failed for " + path);
}

}  // namespace cwsubset
