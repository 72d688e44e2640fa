#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <map>

#include "cwsubset/moments.hpp"
#include "cwsubset/philox.hpp"
#include "cwsubset/sampler.hpp"

using namespace cwsubset;

namespace {

// Two-sample chi-square homogeneity test; returns the p-value.
double homogeneity_p(const std::map<int, long>& a, const std::map<int, long>& b) {
  std::map<int, std::pair<long, long>> cells;
  for (auto [k, v] : a) cells[k].first += v;
  for (auto [k, v] : b) cells[k].second += v;
  double na = 0, nb = 0;
  for (auto& [k, v] : cells) na += v.first, nb += v.second;
  double stat = 0;
  int used = 0;
  for (auto& [k, v] : cells) {
    const double tot = v.first + v.second;
    const double ea = tot * na / (na + nb), eb = tot * nb / (na + nb);
    stat += (v.first - ea) * (v.first - ea) / ea + (v.second - eb) * (v.second - eb) / eb;
    ++used;
  }
  if (used < 2) return 1.0;
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared(used - 1), stat));
}

double mean_sigma_sq(const SampleMatrix& m, std::size_t g = 0) {
  const SumSample s = row_sums(m);
  double acc = 0;
  for (int v : s.groups[g].sigma) acc += double(v) * v;
  return acc / m.n_obs;
}

}  // namespace

TEST_SUITE("sampler") {

TEST_CASE("philox4x64-10 known answers") {
  struct Kat {
    PhiloxCounter ctr;
    PhiloxKey key;
    PhiloxCounter out;
  };
  const Kat kats[] = {
      {{0, 0, 0, 0}, {0, 0},
       {0x16554d9eca36314cULL, 0xdb20fe9d672d0fdcULL, 0xd7e772cee186176bULL, 0x7e68b68aec7ba23bULL}},
      {{1, 0, 0, 0}, {0, 0},
       {0x02f4ba6408e4d89bULL, 0x3dd62b0b9ca8c5b2ULL, 0x1c8667a55d902e79ULL, 0x907d7a052fd5b4dcULL}},
      {{6, 0, 0, 0}, {3, 7},
       {0x68963e78911b4f44ULL, 0x2835dadcf872ee15ULL, 0xd35bf16c1b2f3e88ULL, 0x6da98f28362db820ULL}},
      {{5, 9, 2, 1}, {0xdeadbeefULL, 42},
       {0x58f5ebc8f333dd53ULL, 0xd0e76942013f48beULL, 0x467100b3bf61b176ULL, 0x3362cac35b44fdb0ULL}},
      {{0, 0, 0, 0}, {~0ULL, ~0ULL},
       {0x44b7493d1acfc229ULL, 0x6636af8e997921ddULL, 0x3f73e132b5b3780eULL, 0x605644dde03b01b1ULL}},
  };
  for (const auto& k : kats) CHECK(philox4x64_10(k.ctr, k.key) == k.out);
}

TEST_CASE("bounded draws stay in range and cover it") {
  PhiloxStream rng({1, 2}, 0, 0, 0);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 70000; ++i) {
    const auto v = rng.below(7);
    REQUIRE(v < 7);
    ++hits[v];
  }
  for (int h : hits) CHECK(std::abs(h - 10000) < 400);
  CHECK(to_unit(~0ULL) < 1.0);
  CHECK(to_unit(0) == 0.0);
}

TEST_CASE("fixed seed reproduces the sample") {
  const GroupSpec g{0.8, 30, 11};
  const SamplerConfig cfg{42, 3};
  CHECK(sample_subset(g, 500, cfg) == sample_subset(g, 500, cfg));
  CHECK_FALSE(sample_subset(g, 500, cfg) == sample_subset(g, 500, {42, 4}));
  CHECK_FALSE(sample_subset(g, 500, cfg) == sample_subset(g, 500, {43, 3}));
}

TEST_CASE("entries are +-1 and sums path matches spin path") {
  ModelSpec spec{{{0.3, 40, 17}, {1.7, 9, 9}, {1.0, 5, 1}, {0.0, 6, 2}}};
  const SamplerConfig cfg{7, 11};
  const SampleMatrix m = sample_multigroup(spec, 2000, cfg);
  for (auto x : m.data) REQUIRE((x == 1 || x == -1));
  const SumSample a = row_sums(m);
  const SumSample b = sample_sums(spec, 2000, cfg);
  for (std::size_t g = 0; g < spec.size(); ++g) {
    CHECK(a.groups[g].sigma == b.groups[g].sigma);
    CHECK(a.groups[g].sigma_pair == b.groups[g].sigma_pair);
  }
}

TEST_CASE("independent fair spins at beta = 0") {
  const int n = 100000;
  const SampleMatrix m = sample_full({0.0, 8, 8}, n, {1, 0});
  long plus = 0;
  for (int t = 0; t < n; ++t) plus += m.at(t, 0) == 1;
  CHECK(std::abs(plus - 0.5 * n) <= 3 * std::sqrt(0.25 * n));

  const SampleMatrix s = sample_subset({0.0, 50, 13}, n, {2, 0});
  const double var = 2.0 * 13 * 12;  // Var(Sigma^2) for i.i.d. signs
  CHECK(std::abs(mean_sigma_sq(s) - 13) <= 3 * std::sqrt(var / n));
}

TEST_CASE("pair correlation of N=2 at beta=1") {
  const int n = 100000;
  const SampleMatrix m = sample_full({1.0, 2, 2}, n, {5, 1});
  double acc = 0;
  for (int t = 0; t < n; ++t) acc += m.at(t, 0) * m.at(t, 1);
  const double mean = acc / n;
  const double e = std::tanh(0.5);
  CHECK(std::abs(mean - e) <= 3 * std::sqrt((1 - e * e) / n));
}

TEST_CASE("subset moments match exact moments") {
  const int n = 100000;
  for (auto [beta, big_n, k] : {std::tuple{1.5, 12, 5}, {0.5, 40, 40}, {1.2, 25, 7}}) {
    const auto em = exact_moments(big_n, k, beta, 2);
    const double sd = std::sqrt(em.var_sigma_sq() / n);
    CHECK(std::abs(mean_sigma_sq(sample_subset({beta, big_n, k}, n, {9, 2})) - em.sigma2k(1)) <=
          3 * sd);
  }
  const double full = mean_sigma_sq(sample_full({0.9, 20, 20}, n, {3, 3}));
  const double sub = mean_sigma_sq(sample_subset({0.9, 20, 20}, n, {4, 3}));
  const auto em = exact_moments(20, 20, 0.9, 2);
  CHECK(std::abs(full - sub) <= 3 * std::sqrt(2 * em.var_sigma_sq() / n));
}

TEST_CASE("two-stage subset agrees with truncated full configurations") {
  const int n = 100000;
  int case_id = 0;
  for (auto [beta, big_n, k] : {std::tuple{1.5, 12, 5}, {0.5, 12, 1}, {1.1, 12, 3}, {2.0, 12, 12},
                                {0.7, 7, 4}, {-0.5, 9, 6}}) {
    const GroupSpec g{beta, big_n, k};
    const SampleMatrix full = sample_full(g, n, {100 + static_cast<unsigned>(case_id), 0});
    const SampleMatrix sub = sample_subset(g, n, {200 + static_cast<unsigned>(case_id), 0});
    std::map<int, long> h_full, h_sub;
    for (int t = 0; t < n; ++t) {
      int s = 0;
      for (int i = 0; i < k; ++i) s += full.at(t, i);
      ++h_full[s * s];
      int r = 0;
      for (auto x : sub.row(t)) r += x;
      ++h_sub[r * r];
    }
    CAPTURE(beta);
    CAPTURE(k);
    CHECK(homogeneity_p(h_full, h_sub) > 0.01);
    ++case_id;
  }
}

TEST_CASE("observed columns are exchangeable") {
  const int n = 100000;
  const SampleMatrix m = sample_subset({1.3, 20, 9}, n, {77, 0});
  auto pair_hist = [&](int i, int j) {
    std::map<int, long> h;
    for (int t = 0; t < n; ++t) ++h[(m.at(t, i) + 1) + (m.at(t, j) + 1) / 2];
    return h;
  };
  const auto ref = pair_hist(0, 1);
  CHECK(homogeneity_p(ref, pair_hist(1, 0)) > 0.01);
  CHECK(homogeneity_p(ref, pair_hist(3, 7)) > 0.01);
  CHECK(homogeneity_p(ref, pair_hist(0, 8)) > 0.01);
  CHECK(homogeneity_p(pair_hist(2, 5), pair_hist(8, 1)) > 0.01);
}

TEST_CASE("multi-group sampling") {
  const int n = 100000;
  ModelSpec zero{{{0.0, 10, 4}, {0.0, 10, 4}}};
  const SampleMatrix m = sample_multigroup(zero, n, {11, 0});
  double acc = 0;
  for (int t = 0; t < n; ++t) acc += m.at(t, 0) * m.at(t, 4);
  CHECK(std::abs(acc / n) <= 3 / std::sqrt(double(n)));

  ModelSpec mixed{{{0.5, 30, 12}, {1.5, 25, 25}}};
  const SamplerConfig cfg{12, 5};
  const SampleMatrix both = sample_multigroup(mixed, 3000, cfg);
  for (std::size_t g = 0; g < 2; ++g) {
    const SampleMatrix single = sample_subset(mixed[g], 3000, cfg, g);
    bool same = true;
    for (int t = 0; t < 3000; ++t) {
      const auto a = both.group_row(t, g);
      const auto b = single.row(t);
      same = same && std::equal(a.begin(), a.end(), b.begin());
    }
    CHECK(same);
  }
  CHECK(both == sample_multigroup(mixed, 3000, cfg));
}

TEST_CASE("table budget is enforced") {
  CHECK_THROWS(GroupSampler(GroupSpec{0.5, 2000, 1000}, 1000));
}

}
