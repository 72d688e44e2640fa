#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cwsubset/intervals.hpp"
#include "cwsubset/model.hpp"

namespace cwsubset::harness {

// Flat "key = value" text grouped under "[section]" headers. '#' and ';'
// start comments. Every value keeps its line and column.
class ConfigFile {
 public:
  struct Entry {
    std::string value;
    std::size_t line = 0;
    std::size_t column = 0;
  };

  static ConfigFile parse(const std::string& text);
  static ConfigFile load(const std::string& path);

  const Entry* find(const std::string& section, const std::string& key) const;
  bool has_section(const std::string& section) const { return sections_.count(section) > 0; }

  // ParseError on the first key of `section` not in `allowed`, and on any
  // section not in `sections`.
  void check_schema(const std::map<std::string, std::set<std::string>>& allowed) const;

  std::optional<std::string> get_string(const std::string& section, const std::string& key) const;
  std::optional<double> get_double(const std::string& section, const std::string& key) const;
  std::optional<std::int64_t> get_int(const std::string& section, const std::string& key) const;
  std::optional<std::uint64_t> get_u64(const std::string& section, const std::string& key) const;
  std::optional<std::vector<double>> get_doubles(const std::string& section, const std::string& key) const;
  std::optional<std::vector<int>> get_ints(const std::string& section, const std::string& key) const;
  std::optional<std::vector<std::string>> get_strings(const std::string& section, const std::string& key) const;
  std::optional<Fraction> get_fraction(const std::string& section, const std::string& key) const;
  std::optional<std::vector<Fraction>> get_fractions(const std::string& section, const std::string& key) const;

 private:
  std::map<std::string, std::map<std::string, Entry>> sections_;
  std::map<std::string, std::size_t> section_lines_;
};

enum class ExperimentKind {
  Sample,
  Estimate,
  Consistency,
  Clt,
  Coverage,
  Equivalence,
  ApproxError,
  MlCompare,
  Calibrate,
};

const char* to_string(ExperimentKind kind);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Consistency;
  ModelSpec model;
  // One observed fraction per group; empty means k_obs / n_pop.
  std::vector<Fraction> alpha;
  IntervalParams intervals;
  std::vector<std::string> estimators{"gamma", "zeta"};
  std::vector<int> n_obs{1000};
  int replications = 1;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string out_dir = ".";
  std::string format = "csv";

  // clt / coverage
  double level = 0.95;
  std::string variance = "plugin";  // plugin | oracle

  // equivalence
  double equiv_b_high = 1.0;
  double equiv_b_low = 2.0;
  std::vector<int> equiv_n_pop;
  Fraction equiv_k_fraction{1, 2};

  // approx-error
  std::vector<int> approx_n_pop{50, 100, 200, 400, 800, 1600, 3200};
  std::vector<double> approx_beta{0.5, 1.5};
  Fraction approx_alpha{1, 2};
  int approx_k_max = 3;

  // ml-compare
  std::pair<double, double> ml_bracket{-2.0, 6.0};

  CalibrationSettings calibration;

  // estimate
  std::string input;
  bool zero_one = false;

  // Canonical text of every resolved field, usable as a config file.
  std::string to_text() const;
  nlohmann::ordered_json to_json() const;
};

// Reads and validates a config. Unknown sections or keys, malformed values
// and violated invariants raise ParseError pointing at the offending entry.
ExperimentConfig resolve_config(const ConfigFile& file);
ExperimentConfig load_config(const std::string& path);

// Checks the grid and count invariants of an already assembled config.
void validate(const ExperimentConfig& cfg);

}  // namespace cwsubset::harness
