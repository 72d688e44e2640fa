#include "cwsubset/statistics.hpp"

#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>
#include <string_view>

#include "cwsubset/errors.hpp"

namespace cwsubset {

namespace {

std::int64_t sum_of_squares(const std::vector<std::int32_t>& values, int k_obs) {
  const std::int64_t k = k_obs;
  if (!values.empty() &&
      static_cast<double>(values.size()) * static_cast<double>(k * k) > 9.0e18) {
    throw ResourceError("squared-sum accumulator would overflow");
  }
  std::int64_t acc = 0;
  for (std::int32_t v : values) acc += static_cast<std::int64_t>(v) * v;
  return acc;
}

}  // namespace

GroupStatistic pair_statistic(std::int64_t sum_sq, int n_obs, int k_obs) {
  if (k_obs < 2) throw DomainError("pair correlation needs k_obs >= 2");
  if (n_obs < 1) throw DomainError("statistic needs at least one observation");
  const std::int64_t n = n_obs;
  const std::int64_t k = k_obs;
  GroupStatistic s;
  s.n_obs = n_obs;
  s.k_obs = k_obs;
  s.sum_sq = sum_sq;
  s.value = static_cast<double>(sum_sq - n * k) / (static_cast<double>(n) * k * (k - 1));
  return s;
}

GroupStatistic squared_sum_statistic(std::int64_t sum_sq, int n_obs, int k_obs) {
  if (n_obs < 1) throw DomainError("statistic needs at least one observation");
  GroupStatistic s;
  s.n_obs = n_obs;
  s.k_obs = k_obs;
  s.sum_sq = sum_sq;
  s.value = static_cast<double>(sum_sq) / n_obs;
  return s;
}

StatisticVector compute_P(const SumSample& sums) {
  StatisticVector out;
  out.kind = StatisticKind::PairCorrelation;
  for (const auto& g : sums.groups) {
    out.groups.push_back(pair_statistic(sum_of_squares(g.sigma, g.k_obs), sums.n_obs, g.k_obs));
  }
  return out;
}

StatisticVector compute_T(const SumSample& sums) {
  StatisticVector out;
  out.kind = StatisticKind::SquaredSum;
  for (const auto& g : sums.groups) {
    out.groups.push_back(
        squared_sum_statistic(sum_of_squares(g.sigma, g.k_obs), sums.n_obs, g.k_obs));
  }
  return out;
}

StatisticVector compute_P2(const SumSample& sums) {
  StatisticVector out;
  out.kind = StatisticKind::PairCorrelation;
  for (const auto& g : sums.groups) {
    out.groups.push_back(pair_statistic(sum_of_squares(g.sigma_pair, 2), sums.n_obs, 2));
  }
  return out;
}

StatisticVector compute_P(const SampleMatrix& sample) { return compute_P(row_sums(sample)); }
StatisticVector compute_T(const SampleMatrix& sample) { return compute_T(row_sums(sample)); }

namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(line.substr(start));
      return cells;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

bool parse_int(std::string_view text, long long& out) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size() && !text.empty();
}

}  // namespace

SampleMatrix parse_csv(const std::string& text, const CsvOptions& options) {
  std::vector<std::string_view> lines;
  {
    std::string_view rest(text);
    while (!rest.empty()) {
      const std::size_t nl = rest.find('\n');
      std::string_view line = rest.substr(0, nl);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      lines.push_back(line);
      if (nl == std::string_view::npos) break;
      rest.remove_prefix(nl + 1);
    }
  }
  if (lines.empty() || lines.front().empty()) throw ParseError("missing CSV header", 1, 1);

  SampleMatrix m;
  const auto header = split(lines.front());
  std::size_t column = 1;
  for (const auto cell : header) {
    const std::size_t colon = cell.find(':');
    long long g = -1;
    long long i = -1;
    if (colon == std::string_view::npos || !parse_int(cell.substr(0, colon), g) ||
        !parse_int(cell.substr(colon + 1), i)) {
      throw ParseError("header cell '" + std::string(cell) + "' is not of the form group:index", 1,
                       column);
    }
    const long long groups = static_cast<long long>(m.k_obs.size());
    if (g == groups && i == 0) {
      m.k_obs.push_back(1);
    } else if (groups > 0 && g == groups - 1 && i == m.k_obs.back()) {
      ++m.k_obs.back();
    } else {
      throw ParseError("header cell '" + std::string(cell) + "' out of order", 1, column);
    }
    ++column;
  }
  for (int k : m.k_obs) m.group_offsets.push_back(m.group_offsets.back() + k);

  const std::size_t n_cols = m.n_cols();
  std::size_t last = lines.size();
  while (last > 1 && lines[last - 1].empty()) --last;
  for (std::size_t li = 1; li < last; ++li) {
    const auto cells = split(lines[li]);
    if (cells.size() != n_cols) {
      throw ParseError("expected " + std::to_string(n_cols) + " cells, found " +
                           std::to_string(cells.size()),
                       li + 1, std::min(cells.size(), n_cols) + 1);
    }
    for (std::size_t c = 0; c < n_cols; ++c) {
      long long v = 0;
      if (!parse_int(cells[c], v)) {
        throw ParseError("cell '" + std::string(cells[c]) + "' is not an integer", li + 1, c + 1);
      }
      if (options.zero_one) {
        if (v != 0 && v != 1) {
          throw DomainError("entry " + std::to_string(v) + " at row " + std::to_string(li) +
                            ", column " + std::to_string(c + 1) + " is not 0 or 1");
        }
        v = v == 0 ? -1 : 1;
      } else if (v != -1 && v != 1) {
        throw DomainError("entry " + std::to_string(v) + " at row " + std::to_string(li) +
                          ", column " + std::to_string(c + 1) + " is not -1 or +1");
      }
      m.data.push_back(static_cast<std::int8_t>(v));
    }
    ++m.n_obs;
  }
  return m;
}

SampleMatrix ingest_csv(const std::string& path, const CsvOptions& options) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << is.rdbuf();
  return parse_csv(buf.str(), options);
}

}  // namespace cwsubset
