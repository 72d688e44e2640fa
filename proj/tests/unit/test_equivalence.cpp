#include <doctest.h>

#include <cmath>

#include "cwsubset/curie_weiss.hpp"
#include "cwsubset/equivalence.hpp"
#include "cwsubset/errors.hpp"

using namespace cwsubset;

namespace {

SampleMatrix constant_rows(int n, std::vector<int> row) {
  SampleMatrix m;
  m.n_obs = n;
  m.k_obs = {static_cast<int>(row.size())};
  m.group_offsets = {0, row.size()};
  for (int t = 0; t < n; ++t)
    for (int x : row) m.data.push_back(static_cast<std::int8_t>(x));
  return m;
}

}  // namespace

TEST_SUITE("equivalence") {

TEST_CASE("set membership of extreme samples") {
  ModelSpec spec{{{1.5, 400, 8}}};
  const auto piv = build_intervals(spec, {0.8, 1.2, {}}, IntervalKind::PairScale);
  const auto siv = build_intervals(spec, {0.8, 1.2, {}}, IntervalKind::SumScale);
  const EquivalenceConfig cfg{2.0, std::nullopt};

  const auto unanimous = classify_sample(constant_rows(5, {1, 1, 1, 1, 1, 1, 1, 1}), 0, piv, siv, cfg);
  CHECK_FALSE(unanimous.in_d);
  CHECK_FALSE(unanimous.in_d_prime);
  CHECK_FALSE(unanimous.in_l);

  const auto balanced = classify_sample(constant_rows(5, {1, -1, 1, -1, 1, -1, 1, -1}), 0, piv, siv, cfg);
  CHECK(balanced.in_a);
  CHECK(balanced.in_a_prime);
  CHECK_FALSE(balanced.in_h);

  for (unsigned seed = 0; seed < 200; ++seed) {
    const GroupSpec g{seed % 2 ? 0.4 : 1.6, 60, 20};
    ModelSpec s{{g}};
    const auto p = build_intervals(s, {0.8, 1.2, {}}, IntervalKind::PairScale);
    const auto t = build_intervals(s, {0.8, 1.2, {}}, IntervalKind::SumScale);
    const auto m = classify_sample(sample_subset(g, 3, {seed, 0}), 0, p, t, {1.7, std::nullopt});
    CHECK(m.in_h == (m.in_b && m.in_b_prime));
    CHECK(m.in_l == (m.in_d && m.in_d_prime));
  }
}

TEST_CASE("minus-infinity thresholds") {
  const auto full = minus_infinity_thresholds(GroupSpec{0.5, 30, 30}, 1.0);
  CHECK(full.first == 0.0);
  CHECK(full.second == doctest::Approx(1.0));
  const auto half = minus_infinity_thresholds(GroupSpec{0.5, 100, 50}, 0.5);
  CHECK(half.first == 25.0);
  CHECK(half.second == doctest::Approx(25.5));
  const auto same = minus_infinity_thresholds(GroupSpec{0.5, 100, 50}, 0.49);
  CHECK(same.first == doctest::Approx(same.second));
}

TEST_CASE("equivalence bounds") {
  ModelSpec spec{{{0.5, 100, 50}}};
  const auto piv = build_intervals(spec, {0.8, 1.2, {}}, IntervalKind::PairScale);
  CHECK(equivalence_bound(spec[0], piv, {1.0, Fraction{49, 100}}, Regime::High) == 0.0);
  const auto flat = build_intervals(spec, {0.0, 1.2, {0, 0.116, 0, 0.078}}, IntervalKind::PairScale);
  CHECK(equivalence_bound(spec[0], flat, {1.0, Fraction{3, 10}}, Regime::High) == 0.0);
  const double high = equivalence_bound(spec[0], piv, {1.0, std::nullopt}, Regime::High);
  CHECK(high == doctest::Approx(2.0 * 4.0 * 4.0 * 0.01));

  ModelSpec low{{{1.5, 200, 100}}};
  const auto liv = build_intervals(low, {0.8, 1.2, {}}, IntervalKind::PairScale);
  // Independent minimum of m' on a fine grid.
  double m_min = 1e300;
  for (int i = 0; i <= 20000; ++i) m_min = std::min(m_min, m_prime(1.2 + 0.8 * i / 20000.0));
  const double expect = (1 / m_min) * (1 / (2 * solve_m(1.2))) * (2.0 / 99);
  CHECK(equivalence_bound(low[0], liv, {2.0, std::nullopt}, Regime::Low) == doctest::Approx(expect).epsilon(1e-9));
  CHECK_THROWS_AS(equivalence_bound(low[0], liv, {1.1, std::nullopt}, Regime::Low), DomainError);
  CHECK_THROWS_AS(equivalence_bound(low[0], liv, {1.0, Fraction{1, 1}}, Regime::High), DomainError);
}

TEST_CASE("forced balanced votes give matching minus infinities") {
  ModelSpec spec{{{0.5, 200, 100}}};
  const auto piv = build_intervals(spec, {0.8, 1.2, {}}, IntervalKind::PairScale);
  const auto siv = build_intervals(spec, {0.8, 1.2, {}}, IntervalKind::SumScale);
  std::vector<int> row(100);
  for (int i = 0; i < 100; ++i) row[i] = i % 2 ? 1 : -1;
  const std::vector<SampleMatrix> samples{constant_rows(10, row)};
  const AuditReport r = audit_equivalence(std::span<const SampleMatrix>(samples), spec, 0, piv, siv,
                                          {1.0, std::nullopt}, Regime::High);
  CHECK(r.n_both_minus_inf == 1);
  CHECK(r.violations == 0);
  CHECK(r.max_gap == 0.0);
}

TEST_CASE("Monte-Carlo audits show no violations") {
  for (double beta : {0.5, 1.5}) {
    ModelSpec spec{{{beta, 200, 100}}};
    const auto piv = build_intervals(spec, {0.8, 1.2, {}}, IntervalKind::PairScale);
    const auto siv = build_intervals(spec, {0.8, 1.2, {}}, IntervalKind::SumScale);
    const Regime regime = beta < 1 ? Regime::High : Regime::Low;
    std::vector<SumSample> samples;
    for (unsigned r = 0; r < 200; ++r) samples.push_back(sample_sums(spec, 1000, {2024, r}));
    const AuditReport rep = audit_equivalence(samples, spec[0], 0, piv, siv,
                                              {beta < 1 ? 1.0 : 2.0, std::nullopt}, regime);
    CHECK(rep.violations == 0);
    CHECK(rep.n_in_set > 150);
    CHECK(rep.max_gap <= rep.bound);
  }
}

TEST_CASE("audit reports the offending digest") {
  ModelSpec spec{{{1.5, 200, 100}}};
  const auto piv = build_intervals(spec, {0.8, 1.2, {}}, IntervalKind::PairScale);
  const auto siv = build_intervals(spec, {0.8, 1.2, {}}, IntervalKind::SumScale);
  std::vector<SumSample> samples{sample_sums(spec, 1000, {1, 1})};
  // A deliberately broken pair-scale system makes gamma_hat undecided on L.
  RegimeIntervals broken = piv;
  broken.groups[0].low_lower = 0.99;
  broken.groups[0].high_upper = 0.98;
  try {
    audit_equivalence(samples, spec[0], 0, broken, siv, {2.0, std::nullopt}, Regime::Low);
    FAIL("expected AuditViolation");
  } catch (const AuditViolation& e) {
    CHECK(e.digest() == sample_digest(samples[0], 0));
  }
}

}
