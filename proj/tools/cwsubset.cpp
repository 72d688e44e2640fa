#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cwsubset/errors.hpp"
#include "cwsubset/harness/config.hpp"
#include "cwsubset/harness/experiments.hpp"
#include "cwsubset/version.hpp"

namespace {

using cwsubset::harness::ExperimentKind;

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> threads;
  std::optional<std::string> format;
  std::optional<std::string> input;
  bool zero_one = false;
};

cwsubset::harness::ExperimentConfig resolve(const CommonFlags& f, ExperimentKind kind) {
  cwsubset::harness::ExperimentConfig cfg =
      f.config.empty() ? cwsubset::harness::ExperimentConfig{} : cwsubset::harness::load_config(f.config);
  cfg.kind = kind;
  if (f.seed) cfg.seed = *f.seed;
  if (f.out) cfg.out_dir = *f.out;
  if (f.threads) cfg.threads = *f.threads;
  if (f.format) cfg.format = *f.format;
  if (f.input) cfg.input = *f.input;
  if (f.zero_one) cfg.zero_one = true;
  cwsubset::harness::validate(cfg);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Curie-Weiss subset sampling, estimation and verification experiments"};
  app.set_version_flag("--version", std::string(cwsubset::kVersion));
  app.require_subcommand(1);

  CommonFlags flags;
  const std::pair<const char*, ExperimentKind> commands[] = {
      {"sample", ExperimentKind::Sample},
      {"estimate", ExperimentKind::Estimate},
      {"consistency", ExperimentKind::Consistency},
      {"clt", ExperimentKind::Clt},
      {"coverage", ExperimentKind::Coverage},
      {"equivalence", ExperimentKind::Equivalence},
      {"approx-error", ExperimentKind::ApproxError},
      {"ml-compare", ExperimentKind::MlCompare},
      {"calibrate-constants", ExperimentKind::Calibrate},
  };
  const char* descriptions[] = {
      "draw one multi-group sample and write it as CSV",
      "estimate the couplings from a sample CSV",
      "median estimation error across a grid of sample sizes",
      "variance and normality of the scaled estimation error",
      "coverage of the confidence intervals",
      "audit the distance between the two estimators",
      "exact versus asymptotic moments over a grid of population sizes",
      "closed-form estimator versus the exact likelihood condition root",
      "fit the interval constants from exact moments",
  };

  std::optional<ExperimentKind> chosen;
  for (std::size_t i = 0; i < std::size(commands); ++i) {
    CLI::App* sub = app.add_subcommand(commands[i].first, descriptions[i]);
    sub->add_option("--config", flags.config, "config file")->check(CLI::ExistingFile);
    sub->add_option("--seed", flags.seed, "base seed");
    sub->add_option("--out", flags.out, "output directory");
    sub->add_option("--threads", flags.threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--format", flags.format, "report format")->check(CLI::IsMember({"csv", "json"}));
    if (commands[i].second == ExperimentKind::Estimate) {
      sub->add_option("--input", flags.input, "sample CSV");
      sub->add_flag("--zero-one", flags.zero_one, "entries are 0/1 instead of -1/+1");
    }
    const ExperimentKind kind = commands[i].second;
    sub->callback([&chosen, kind] { chosen = kind; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  cwsubset::harness::ExperimentConfig cfg;
  try {
    cfg = resolve(flags, *chosen);
  } catch (const cwsubset::ParseError& e) {
    std::cerr << flags.config << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    const cwsubset::harness::Report report = cwsubset::harness::run_experiment(cfg);
    for (const auto& path : cwsubset::harness::write_report(report, cfg)) std::cout << path << "\n";
    if (!report.passed) {
      std::cerr << report.name << ": assertion failed\n";
      return 2;
    }
  } catch (const cwsubset::AuditViolation& e) {
    std::cerr << "audit violation: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
