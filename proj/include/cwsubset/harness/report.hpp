#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "cwsubset/harness/config.hpp"

namespace cwsubset::harness {

// Shortest text that reads back to the same double; "inf", "-inf", "nan"
// for the non-finite values.
std::string format_double(double v);

// JSON number, or the strings "+inf", "-inf", "nan".
nlohmann::ordered_json json_number(double v);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  class Row {
   public:
    Row& operator<<(const std::string& s);
    Row& operator<<(const char* s) { return *this << std::string(s); }
    Row& operator<<(double v) { return *this << format_double(v); }
    Row& operator<<(int v) { return *this << std::to_string(v); }
    Row& operator<<(long v) { return *this << std::to_string(v); }
    Row& operator<<(long long v) { return *this << std::to_string(v); }
    Row& operator<<(unsigned long v) { return *this << std::to_string(v); }
    Row& operator<<(unsigned long long v) { return *this << std::to_string(v); }

   private:
    friend class CsvTable;
    std::vector<std::string> cells_;
  };

  Row& add_row();
  const std::vector<std::string>& header() const { return header_; }
  const std::vector<Row>& rows() const { return rows_; }

  // Header comment lines carry the library version and the resolved config.
  std::string render(const ExperimentConfig& cfg) const;
  nlohmann::ordered_json to_json() const;

 private:
  std::vector<std::string> header_;
  std::vector<Row> rows_;
};

struct Report {
  std::string name;
  std::vector<std::pair<std::string, CsvTable>> tables;
  nlohmann::ordered_json summary = nlohmann::ordered_json::object();
  // False when an assertion of the experiment failed.
  bool passed = true;
};

// Writes <out>/<name>.json (always) and one <out>/<name>_<table>.csv per
// table when the format is csv; with format json the tables are embedded
// in the JSON. Both embed version and resolved config. Returns written paths.
std::vector<std::string> write_report(const Report& report, const ExperimentConfig& cfg);

}  // namespace cwsubset::harness
