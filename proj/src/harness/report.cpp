#include "cwsubset/harness/report.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "cwsubset/version.hpp"

namespace cwsubset::harness {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

nlohmann::ordered_json json_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
  return v;
}

CsvTable::Row& CsvTable::Row::operator<<(const std::string& s) {
  cells_.push_back(s);
  return *this;
}

CsvTable::Row& CsvTable::add_row() { return rows_.emplace_back(); }

std::string CsvTable::render(const ExperimentConfig& cfg) const {
  std::ostringstream os;
  os << "# cwsubset " << kVersion << "\n";
  os << "# experiment " << to_string(cfg.kind) << "\n";
  std::istringstream cfg_text(cfg.to_text());
  for (std::string line; std::getline(cfg_text, line);) os << "# config " << line << "\n";
  for (std::size_t i = 0; i < header_.size(); ++i) os << (i ? "," : "") << header_[i];
  os << "\n";
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.cells_.size(); ++i) os << (i ? "," : "") << row.cells_[i];
    os << "\n";
  }
  return os.str();
}

nlohmann::ordered_json CsvTable::to_json() const {
  nlohmann::ordered_json j;
  j["columns"] = header_;
  auto& rows = j["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : rows_) rows.push_back(row.cells_);
  return j;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << text;
  if (!os) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace

std::vector<std::string> write_report(const Report& report, const ExperimentConfig& cfg) {
  const std::filesystem::path dir(cfg.out_dir);
  std::filesystem::create_directories(dir);
  std::vector<std::string> written;

  nlohmann::ordered_json j;
  j["experiment"] = report.name;
  j["version"] = kVersion;
  j["config"] = cfg.to_json();
  j["passed"] = report.passed;
  j["summary"] = report.summary;
  if (cfg.format == "json") {
    auto& tables = j["tables"] = nlohmann::ordered_json::object();
    for (const auto& [name, table] : report.tables) tables[name] = table.to_json();
  } else {
    for (const auto& [name, table] : report.tables) {
      const auto path = dir / (report.name + "_" + name + ".csv");
      write_file(path, table.render(cfg));
      written.push_back(path.string());
    }
  }
  const auto path = dir / (report.name + ".json");
  write_file(path, j.dump(2) + "\n");
  written.insert(written.begin(), path.string());
  return written;
}

}  // namespace cwsubset::harness
