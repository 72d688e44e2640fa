#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "cwsubset/curie_weiss.hpp"
#include "cwsubset/errors.hpp"
#include "cwsubset/magnetization.hpp"
#include "cwsubset/moments.hpp"
#include "oracles.hpp"

using namespace cwsubset;

TEST_SUITE("cw-core") {

TEST_CASE("solve_m matches bisection and known points") {
  CHECK(solve_m(1.0) == 0.0);
  CHECK(std::abs(solve_m(2.0) - oracle::m_bisect(2.0)) < 1e-12);
  CHECK(std::abs(solve_m(2.0) - 0.957504) < 1e-6);
  CHECK(std::abs(solve_m(50.0) - 1.0) < 1e-10);
  CHECK(std::abs(solve_m(1.2) - 0.6585696604) < 1e-9);
  CHECK_THROWS_AS(solve_m(0.99), DomainError);
  CHECK_THROWS_AS(solve_m(std::nan("")), DomainError);
  for (double beta = 1.01; beta < 10.0; beta += 0.37) {
    const double m = solve_m(beta);
    CHECK(std::abs(std::tanh(beta * m) - m) < 1e-12);
  }
}

TEST_CASE("solve_m is strictly increasing") {
  double prev = solve_m(1.001);
  for (double beta = 1.01; beta < 12.0; beta += 0.05) {
    const double m = solve_m(beta);
    CHECK(m > prev);
    prev = m;
  }
}

TEST_CASE("m_prime agrees with central differences") {
  // Five-point central stencil; the step shrinks towards criticality where
  // higher derivatives grow.
  auto fd = [](double beta) {
    const double h = 1e-2 * std::min(1.0, beta - 1.0);
    return (-solve_m(beta + 2 * h) + 8 * solve_m(beta + h) - 8 * solve_m(beta - h) +
            solve_m(beta - 2 * h)) / (12 * h);
  };
  for (double beta = 1.1; beta <= 10.0 + 1e-9; beta += 0.01) {
    CHECK(oracle::rel_close(m_prime(beta), fd(beta), 1e-6));
  }
  CHECK(std::abs(m_prime(2.0) - 0.0955474) < 1e-6);
  CHECK_THROWS_AS(m_prime(1.0), DomainError);
  // Near criticality the derivative is either huge or rejected.
  try {
    const double v = m_prime(1.0 + 1e-9);
    CHECK(v > 1e3);
  } catch (const DomainError&) {
  }
}

TEST_CASE("m_inverse closed form and round trip") {
  CHECK(std::abs(m_inverse(std::tanh(1.0)) - 1.0 / std::tanh(1.0)) < 1e-12);
  CHECK(std::abs(m_inverse(1e-9) - 1.0) < 1e-15);
  CHECK(std::abs(m_inverse(0.957504) - 2.0) < 1e-4);
  for (double beta = 1.05; beta <= 10.0; beta += 0.05) {
    CHECK(std::abs(m_inverse(solve_m(beta)) - beta) < 1e-8 * beta);
  }
  for (double y = 0.01; y < 0.999; y += 0.01) {
    CHECK(std::abs(solve_m(m_inverse(y)) - y) < 1e-10);
  }
  CHECK_THROWS_AS(m_inverse(0.0), DomainError);
  CHECK_THROWS_AS(m_inverse(1.0), DomainError);
}

TEST_CASE("partition function small cases") {
  for (double beta : {-1.0, 0.0, 0.7, 2.0}) {
    CHECK(std::abs(magnetization_distribution(1, beta).log_z() - std::log(2 * std::exp(beta / 2))) < 1e-12);
  }
  CHECK(std::abs(std::exp(magnetization_distribution(2, 1.0).log_z()) - (2 * std::exp(1.0) + 2)) < 1e-10);
  const auto d = magnetization_distribution(20, 0.0);
  CHECK(std::abs(d.log_z() - 20 * std::log(2.0)) < 1e-10);
  CHECK(std::abs(d.probabilities()[10] - 184756.0 / 1048576.0) < 1e-14);
}

TEST_CASE("sector probabilities are normalised and symmetric") {
  for (int n = 1; n <= 200; ++n) {
    for (double beta : {-1.0, 0.0, 0.5, 1.0, 1.5, 3.0}) {
      const auto d = magnetization_distribution(n, beta);
      double total = 0.0;
      for (double p : d.probabilities()) total += p;
      CHECK(std::abs(total - 1.0) < 1e-12);
      const auto lw = d.log_weights();
      CHECK(lw.front() == lw.back());
      double z = 0.0;
      for (double w : lw) total += 0, z += std::exp(w - d.log_z());
      CHECK(std::abs(z - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("log_z matches enumeration") {
  for (int n = 1; n <= 14; ++n) {
    for (double beta : {-0.5, 0.5, 1.5}) {
      const auto brute = oracle::enumerate(n, n, beta);
      CHECK(oracle::rel_close(magnetization_distribution(n, beta).log_z(), std::log(brute.z), 1e-12));
    }
  }
}

TEST_CASE("hypergeometric pmf sums to one and matches counting") {
  const auto h = hypergeometric_pmf(10, 4, 3);
  CHECK(h.lo == 0);
  CHECK(h.hi == 3);
  // C(4,h) C(6,3-h) / C(10,3)
  const double expect[] = {20.0 / 120, 60.0 / 120, 36.0 / 120, 4.0 / 120};
  for (int i = 0; i < 4; ++i) CHECK(std::abs(h.pmf[i] - expect[i]) < 1e-15);
  const auto degenerate = hypergeometric_pmf(7, 3, 7);
  CHECK(degenerate.lo == 3);
  CHECK(degenerate.hi == 3);
  CHECK(degenerate.pmf[0] == 1.0);
  CHECK_THROWS_AS(hypergeometric_pmf(5, 6, 2), DomainError);
}

TEST_CASE("exact moments match 2^N enumeration") {
  for (int n = 1; n <= 14; ++n) {
    for (int k : {1, (n + 1) / 2, n}) {
      for (double beta : {-0.5, 0.0, 0.5, 1.0, 1.5}) {
        const auto brute = oracle::enumerate(n, k, beta);
        const auto em = exact_moments(n, k, beta, 2);
        CHECK(oracle::rel_close(em.s2k(1), brute.e_s2, 1e-10));
        CHECK(oracle::rel_close(em.s2k(2), brute.e_s4, 1e-10));
        CHECK(oracle::rel_close(em.sigma2k(1), brute.e_sigma2, 1e-10));
        CHECK(oracle::rel_close(em.sigma2k(2), brute.e_sigma4, 1e-10));
        if (n >= 2) CHECK(oracle::rel_close(*em.e_pair, brute.e_x1x2, 1e-10, 1e-14));
      }
    }
  }
}

TEST_CASE("exact moments closed forms") {
  for (int n : {3, 17, 60}) {
    const auto em = exact_moments(n, n / 2 + 1, 0.0, 2);
    CHECK(std::abs(em.s2k(1) - n) < 1e-9 * n);
    CHECK(std::abs(em.sigma2k(1) - (n / 2 + 1)) < 1e-9 * n);
  }
  for (double beta : {-2.0, 0.3, 1.0, 4.0}) {
    CHECK(std::abs(*exact_moments(2, 2, beta, 1).e_pair - std::tanh(beta / 2)) < 1e-12);
  }
  for (double beta : {0.5, 1.5}) {
    const auto em = exact_moments(30, 30, beta, 3);
    for (int k = 1; k <= 3; ++k) CHECK(oracle::rel_close(em.s2k(k), em.sigma2k(k), 1e-12));
    const double n = 30;
    CHECK(std::abs(*em.e_pair - (em.s2k(1) - n) / (n * (n - 1))) < 1e-15);
  }
  CHECK_FALSE(exact_moments(1, 1, 0.3, 1).e_pair.has_value());
  CHECK_THROWS_AS(exact_moments(1000, 500, 0.5, 1, 1000), ResourceError);
  CHECK_THROWS_AS(exact_moments(10, 11, 0.5, 1), DomainError);
}

TEST_CASE("correlation moments") {
  CHECK(correlation_moment(9, 1.5, 3) == 0.0);
  for (double beta : {0.5, 1.5}) {
    const auto em = exact_moments(12, 12, beta, 1);
    CHECK(std::abs(correlation_moment(12, beta, 2) - *em.e_pair) < 1e-14);
  }
  // E X1..X4 from E S^4 by exchangeability:
  // S^4 = N + 3N(N-1)... use enumeration instead.
  const int n = 10;
  double z = 0, acc = 0;
  for (std::uint32_t c = 0; c < (1u << n); ++c) {
    int s = 0, prod = 1;
    for (int i = 0; i < n; ++i) {
      const int x = (c >> i) & 1u ? 1 : -1;
      s += x;
      if (i < 4) prod *= x;
    }
    const double w = std::exp(1.3 * s * s / (2.0 * n));
    z += w;
    acc += w * prod;
  }
  CHECK(oracle::rel_close(correlation_moment(n, 1.3, 4), acc / z, 1e-10));
}

TEST_CASE("asymptotic agreement improves with N") {
  double prev_h = 1e9, prev_l = 1e9;
  for (int n : {50, 100, 200, 400, 800}) {
    const double e_h = *exact_moments(n, 2, 0.5, 1).e_pair;
    const double e_l = *exact_moments(n, 2, 1.5, 1).e_pair;
    const double err_h = std::abs(n * e_h - 1.0);
    const double err_l = std::abs(e_l - std::pow(solve_m(1.5), 2));
    CHECK(err_h < prev_h);
    CHECK(err_l < prev_l);
    prev_h = err_h;
    prev_l = err_l;
  }
}

TEST_CASE("ML condition oracle") {
  const double t1 = exact_moments(50, 25, 0.5, 1).sigma2k(1);
  CHECK(std::abs(ml_condition_solve(t1, 50, 25, {0.0, 1.0}) - 0.5) < 1e-6);
  const double t2 = exact_moments(20, 10, 1.5, 1).sigma2k(1);
  CHECK(std::abs(ml_condition_solve(t2, 20, 10, {0.0, 3.0}) - 1.5) < 1e-6);
  const double t3 = exact_moments(400, 400, 0.0, 1).sigma2k(1);
  CHECK(std::abs(ml_condition_solve(t3, 400, 400, {-1.0, 1.0})) < 1e-6);
  CHECK_THROWS_AS(ml_condition_solve(t1, 50, 25, {0.6, 1.0}), BracketError);
  CHECK_THROWS_AS(ml_condition_solve(625.0, 50, 25, {0.0, 1.0}), DomainError);
}

}
