#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include <boost/math/distributions/normal.hpp>

#include "cwsubset/errors.hpp"
#include "cwsubset/harness/config.hpp"
#include "cwsubset/harness/experiments.hpp"
#include "cwsubset/harness/parallel.hpp"
#include "cwsubset/harness/report.hpp"
#include "cwsubset/harness/summary.hpp"

using namespace cwsubset;
using namespace cwsubset::harness;

namespace {

std::pair<std::size_t, std::size_t> parse_error_at(const std::string& text) {
  try {
    resolve_config(ConfigFile::parse(text));
  } catch (const ParseError& e) {
    return {e.line(), e.column()};
  }
  return {0, 0};
}

// A^2 = -n - (1/n) sum (2i - 1)[ln F(x_i) + ln(1 - F(x_{n+1-i}))], with
// mean and sd estimated from the data.
double anderson_darling_oracle(std::vector<double> x) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  const double mu = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : x) ss += (v - mu) * (v - mu);
  const boost::math::normal dist(mu, std::sqrt(ss / (n - 1.0)));
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    acc += (2.0 * (i + 1) - 1.0) *
           (std::log(boost::math::cdf(dist, x[i])) + std::log(boost::math::cdf(boost::math::complement(dist, x[x.size() - 1 - i]))));
  }
  return -n - acc / n;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("config parses sections, lists and fractions") {
  const auto cfg = resolve_config(ConfigFile::parse(R"(
# comment
[model]
beta = 0.5, 1.5   ; trailing comment
n_pop = 200
k_obs = 100, 50
alpha = 1/2, 0.25

[run]
estimators = gamma, zeta, gamma2, ml_oracle
n_obs = 100, 1000
replications = 7
seed = 18446744073709551615

[equivalence]
n_pop = 100, 400
k_fraction = 1/4
)"));
  REQUIRE(cfg.model.size() == 2);
  CHECK(cfg.model[1].beta == 1.5);
  CHECK(cfg.model[1].n_pop == 200);
  CHECK(cfg.model[1].k_obs == 50);
  CHECK(cfg.alpha[1] == Fraction{1, 4});
  CHECK(cfg.estimators.size() == 4);
  CHECK(cfg.n_obs == std::vector<int>{100, 1000});
  CHECK(cfg.replications == 7);
  CHECK(cfg.seed == 18446744073709551615ull);
  CHECK(cfg.equiv_k_fraction == Fraction{1, 4});

  // The canonical text reads back to the same config.
  const auto again = resolve_config(ConfigFile::parse(cfg.to_text()));
  CHECK(again.to_text() == cfg.to_text());
  CHECK(again.to_json() == cfg.to_json());
}

TEST_CASE("config errors carry line and column") {
  CHECK(parse_error_at("[model]\nbeta = 0.5\nn_pop = 10\nk_obs = 20\n").first == 4);
  CHECK(parse_error_at("[run]\nseed = 1\nthreads = 0\n") == std::pair<std::size_t, std::size_t>{3, 11});
  CHECK(parse_error_at("[run]\nn_obs = 10, x\n").first == 2);
  CHECK(parse_error_at("[run]\nformat = xml\n").first == 2);
  CHECK(parse_error_at("\n\n[nope]\n").first == 3);
  CHECK(parse_error_at("[run]\nseedling = 3\n").first == 2);
  CHECK(parse_error_at("[run\n").first == 1);
  CHECK(parse_error_at("beta = 1\n").first == 1);
  CHECK(parse_error_at("[run]\nseed 4\n").first == 2);
  CHECK(parse_error_at("[run]\nseed = 1\nseed = 2\n").first == 3);
  CHECK(parse_error_at("[run]\n[run]\n").first == 2);
  CHECK(parse_error_at("[model]\nbeta = 1\nn_pop = 10\nk_obs = 5\nalpha = 3/2\n").first == 5);
  CHECK(parse_error_at("[model]\nbeta = 1, 2, 3\nn_pop = 10, 20\nk_obs = 5\n").first == 3);
  CHECK(parse_error_at("[run]\nestimators = gamma, delta\n").first == 2);
  CHECK(parse_error_at("[inference]\nlevel = 1.5\n").first == 2);
  CHECK(parse_error_at("[equivalence]\nb_low = 1.1\n").first == 2);
  CHECK(parse_error_at("[ml_compare]\nbracket = 3, 1\n").first == 2);
}

TEST_CASE("quantiles, moments and covariance") {
  const std::vector<double> v{3, 1, 4, 1, 5, 9, 2, 6};
  CHECK(quantile(v, 0.0) == 1.0);
  CHECK(quantile(v, 1.0) == 9.0);
  CHECK(quantile(v, 0.5) == doctest::Approx(3.5));
  const Quartiles q = quartiles(v);
  CHECK(q.q1 == doctest::Approx(1.75));
  CHECK(q.q3 == doctest::Approx(5.25));
  CHECK(mean(v) == doctest::Approx(31.0 / 8.0));
  double ss = 0.0;
  for (double x : v) ss += (x - 31.0 / 8.0) * (x - 31.0 / 8.0);
  CHECK(sample_variance(v) == doctest::Approx(ss / 7.0));
  CHECK(sample_covariance(v, v) == doctest::Approx(ss / 7.0));
  CHECK_THROWS_AS(quantile({}, 0.5), DomainError);
}

TEST_CASE("Anderson-Darling statistic matches the textbook sum") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  std::exponential_distribution<double> expo;
  std::vector<double> gauss(400), skewed(400);
  for (auto& x : gauss) x = normal(rng);
  for (auto& x : skewed) x = expo(rng);
  const auto g = anderson_darling(gauss);
  CHECK(g.a2 == doctest::Approx(anderson_darling_oracle(gauss)).epsilon(1e-9));
  CHECK(g.a2_star == doctest::Approx(g.a2 * (1 + 0.75 / 400 + 2.25 / 160000)));
  CHECK(g.passed);
  const auto s = anderson_darling(skewed);
  CHECK(s.a2 == doctest::Approx(anderson_darling_oracle(skewed)).epsilon(1e-9));
  CHECK_FALSE(s.passed);
}

TEST_CASE("log-log fit recovers a power law") {
  std::vector<double> x, y;
  for (double n : {50.0, 100.0, 200.0, 400.0}) {
    x.push_back(n);
    y.push_back(3.0 * std::pow(n, -1.5));
  }
  const PowerFit f = log_log_fit(x, y);
  CHECK(f.slope == doctest::Approx(-1.5));
  CHECK(std::exp(f.intercept) == doctest::Approx(3.0));
  CHECK(f.r_squared == doctest::Approx(1.0));
}

TEST_CASE("parallel_map keeps index order and rethrows") {
  const auto serial = parallel_map(1000, 1, [](std::size_t i) { return i * i; });
  const auto par = parallel_map(1000, 8, [](std::size_t i) { return i * i; });
  CHECK(serial == par);
  CHECK(par[999] == 999u * 999u);
  CHECK_THROWS_AS(parallel_map(10, 4,
                               [](std::size_t i) -> int {
                                 if (i == 7) throw RangeError("boom");
                                 return 0;
                               }),
                  RangeError);
}

TEST_CASE("number formatting round-trips") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 0.0}) {
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(-INFINITY) == "-inf");
  CHECK(format_double(NAN) == "nan");
  CHECK(json_number(INFINITY) == "+inf");
}

TEST_CASE("experiments are identical serial and parallel") {
  ExperimentConfig cfg;
  cfg.model = ModelSpec{{GroupSpec{0.3, 60, 30}, GroupSpec{2.0, 60, 20}}};
  cfg.estimators = {"gamma", "zeta", "gamma2"};
  cfg.n_obs = {100, 400};
  cfg.replications = 12;
  cfg.seed = 77;
  auto run = [&](int threads) {
    ExperimentConfig c = cfg;
    c.threads = threads;
    nlohmann::ordered_json j;
    j["consistency"] = to_report(run_consistency(c)).summary;
    j["clt"] = to_report(run_clt(c)).summary;
    j["coverage"] = to_report(run_coverage(c)).summary;
    return j.dump();
  };
  CHECK(run(1) == run(8));
  CHECK(run(3) == run(1));
}

TEST_CASE("reports embed version and config") {
  ExperimentConfig cfg;
  cfg.model = ModelSpec{{GroupSpec{0.5, 40, 20}}};
  cfg.n_obs = {50};
  cfg.replications = 3;
  cfg.out_dir = (std::filesystem::temp_directory_path() / "cwsubset-report-test").string();
  cfg.kind = ExperimentKind::Consistency;
  const auto files = write_report(run_experiment(cfg), cfg);
  REQUIRE(files.size() == 3);
  std::ifstream is(files[1]);
  std::string first, second, third;
  std::getline(is, first);
  std::getline(is, second);
  std::getline(is, third);
  CHECK(first.rfind("# cwsubset ", 0) == 0);
  CHECK(second == "# experiment consistency");
  CHECK(third == "# config [model]");
  std::ifstream js(files[0]);
  const auto j = nlohmann::json::parse(js);
  CHECK(j["config"]["model"][0]["n_pop"] == 40);
  CHECK(j.contains("version"));
  std::filesystem::remove_all(cfg.out_dir);
}

TEST_CASE("estimate reads back a sampled CSV") {
  ExperimentConfig cfg;
  cfg.model = ModelSpec{{GroupSpec{0.5, 40, 20}, GroupSpec{1.8, 30, 10}}};
  cfg.n_obs = {2000};
  cfg.seed = 4;
  cfg.out_dir = (std::filesystem::temp_directory_path() / "cwsubset-estimate-test").string();
  run_sample(cfg);
  cfg.input = cfg.out_dir + "/sample.csv";
  const Report r = run_estimate(cfg);
  REQUIRE(r.summary["estimates"].size() == 4);
  CHECK(r.summary["estimates"][0]["outcome"] == "finite");
  CHECK(r.summary["estimates"][1]["regime"] == "low");

  ExperimentConfig wrong = cfg;
  wrong.model = ModelSpec{{GroupSpec{0.5, 40, 20}}};
  CHECK_THROWS_AS(run_estimate(wrong), DomainError);
  std::filesystem::remove_all(cfg.out_dir);
}

}  // TEST_SUITE
