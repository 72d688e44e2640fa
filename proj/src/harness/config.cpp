#include "cwsubset/harness/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "cwsubset/errors.hpp"
#include "cwsubset/harness/report.hpp"
#include "cwsubset/version.hpp"

namespace cwsubset::harness {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string_view rest(text);
  while (true) {
    const std::size_t comma = rest.find(',');
    out.emplace_back(trim(rest.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return out;
}

[[noreturn]] void fail(const ConfigFile::Entry& e, const std::string& what) {
  throw ParseError(what, e.line, e.column);
}

double to_double(const ConfigFile::Entry& e, const std::string& text) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    fail(e, "'" + text + "' is not a number");
  }
  return v;
}

std::int64_t to_int(const ConfigFile::Entry& e, const std::string& text) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    fail(e, "'" + text + "' is not an integer");
  }
  return v;
}

}  // namespace

ConfigFile ConfigFile::parse(const std::string& text) {
  ConfigFile out;
  std::string section;
  std::istringstream is(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(is, raw)) {
    ++line_no;
    std::string_view line(raw);
    if (const auto c = line.find_first_of("#;"); c != std::string_view::npos) line = line.substr(0, c);
    const std::size_t indent = line.find_first_not_of(" \t\r");
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError("unterminated section header", line_no, indent + 1);
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (section.empty()) throw ParseError("empty section name", line_no, indent + 1);
      if (out.sections_.count(section)) {
        throw ParseError("section [" + section + "] repeated", line_no, indent + 1);
      }
      out.sections_[section];
      out.section_lines_[section] = line_no;
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected 'key = value'", line_no, indent + 1);
    if (section.empty()) throw ParseError("key outside of any section", line_no, indent + 1);
    const std::string key(trim(line.substr(0, eq)));
    if (key.empty()) throw ParseError("missing key", line_no, indent + 1);
    const std::string_view value_part = line.substr(eq + 1);
    const std::size_t value_offset = raw.find('=', indent) + 1 +
                                     value_part.find_first_not_of(" \t") ;
    Entry entry{std::string(trim(value_part)), line_no,
                value_part.find_first_not_of(" \t") == std::string_view::npos ? raw.size() + 1
                                                                               : value_offset + 1};
    auto& keys = out.sections_[section];
    if (keys.count(key)) throw ParseError("key '" + key + "' repeated", line_no, indent + 1);
    keys.emplace(key, std::move(entry));
  }
  return out;
}

ConfigFile ConfigFile::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config " + path);
  std::ostringstream buf;
  buf << is.rdbuf();
  return parse(buf.str());
}

const ConfigFile::Entry* ConfigFile::find(const std::string& section, const std::string& key) const {
  const auto s = sections_.find(section);
  if (s == sections_.end()) return nullptr;
  const auto k = s->second.find(key);
  return k == s->second.end() ? nullptr : &k->second;
}

void ConfigFile::check_schema(const std::map<std::string, std::set<std::string>>& allowed) const {
  for (const auto& [section, keys] : sections_) {
    const auto a = allowed.find(section);
    if (a == allowed.end()) {
      throw ParseError("unknown section [" + section + "]", section_lines_.at(section), 1);
    }
    for (const auto& [key, entry] : keys) {
      if (!a->second.count(key)) {
        throw ParseError("unknown key '" + key + "' in [" + section + "]", entry.line, 1);
      }
    }
  }
}

std::optional<std::string> ConfigFile::get_string(const std::string& section,
                                                  const std::string& key) const {
  const Entry* e = find(section, key);
  if (!e) return std::nullopt;
  return e->value;
}

std::optional<double> ConfigFile::get_double(const std::string& section, const std::string& key) const {
  const Entry* e = find(section, key);
  if (!e) return std::nullopt;
  return to_double(*e, e->value);
}

std::optional<std::int64_t> ConfigFile::get_int(const std::string& section,
                                                const std::string& key) const {
  const Entry* e = find(section, key);
  if (!e) return std::nullopt;
  return to_int(*e, e->value);
}

std::optional<std::uint64_t> ConfigFile::get_u64(const std::string& section,
                                                 const std::string& key) const {
  const Entry* e = find(section, key);
  if (!e) return std::nullopt;
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(e->value.data(), e->value.data() + e->value.size(), v);
  if (ec != std::errc() || ptr != e->value.data() + e->value.size() || e->value.empty()) {
    fail(*e, "'" + e->value + "' is not an unsigned 64-bit integer");
  }
  return v;
}

std::optional<std::vector<double>> ConfigFile::get_doubles(const std::string& section,
                                                           const std::string& key) const {
  const Entry* e = find(section, key);
  if (!e) return std::nullopt;
  std::vector<double> out;
  for (const auto& item : split_list(e->value)) out.push_back(to_double(*e, item));
  return out;
}

std::optional<std::vector<int>> ConfigFile::get_ints(const std::string& section,
                                                     const std::string& key) const {
  const Entry* e = find(section, key);
  if (!e) return std::nullopt;
  std::vector<int> out;
  for (const auto& item : split_list(e->value)) {
    const std::int64_t v = to_int(*e, item);
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
      fail(*e, "'" + item + "' is out of range");
    }
    out.push_back(static_cast<int>(v));
  }
  return out;
}

std::optional<std::vector<std::string>> ConfigFile::get_strings(const std::string& section,
                                                                const std::string& key) const {
  const Entry* e = find(section, key);
  if (!e) return std::nullopt;
  return split_list(e->value);
}

std::optional<Fraction> ConfigFile::get_fraction(const std::string& section,
                                                 const std::string& key) const {
  const Entry* e = find(section, key);
  if (!e) return std::nullopt;
  try {
    return parse_fraction(e->value);
  } catch (const DomainError& err) {
    fail(*e, err.what());
  }
}

std::optional<std::vector<Fraction>> ConfigFile::get_fractions(const std::string& section,
                                                               const std::string& key) const {
  const Entry* e = find(section, key);
  if (!e) return std::nullopt;
  std::vector<Fraction> out;
  for (const auto& item : split_list(e->value)) {
    try {
      out.push_back(parse_fraction(item));
    } catch (const DomainError& err) {
      fail(*e, err.what());
    }
  }
  return out;
}

const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Sample: return "sample";
    case ExperimentKind::Estimate: return "estimate";
    case ExperimentKind::Consistency: return "consistency";
    case ExperimentKind::Clt: return "clt";
    case ExperimentKind::Coverage: return "coverage";
    case ExperimentKind::Equivalence: return "equivalence";
    case ExperimentKind::ApproxError: return "approx-error";
    case ExperimentKind::MlCompare: return "ml-compare";
    case ExperimentKind::Calibrate: return "calibrate-constants";
  }
  return "?";
}

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"model", {"beta", "n_pop", "k_obs", "alpha"}},
      {"intervals", {"b1", "b2", "c_high", "c_low", "d_high", "d_low"}},
      {"run", {"estimators", "n_obs", "replications", "seed", "threads", "out", "format"}},
      {"inference", {"level", "variance"}},
      {"equivalence", {"b_high", "b_low", "n_pop", "k_fraction"}},
      {"approx_error", {"n_pop", "beta", "alpha", "k_max"}},
      {"ml_compare", {"bracket"}},
      {"calibration", {"b1", "b2", "alpha", "n_min", "n_max", "n_step", "beta_points", "low_span"}},
      {"estimate", {"input", "zero_one"}},
  };
  return s;
}

template <typename T>
std::vector<T> broadcast(const ConfigFile& f, const std::string& key, std::vector<T> values,
                         std::size_t groups) {
  if (values.size() == groups) return values;
  if (values.size() == 1) return std::vector<T>(groups, values.front());
  fail(*f.find("model", key), "expected 1 or " + std::to_string(groups) + " values");
}

std::string join_numbers(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_double(v[i]);
  return s;
}

std::string join_ints(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + std::to_string(v[i]);
  return s;
}

std::string fraction_text(const Fraction& f) {
  return std::to_string(f.num) + "/" + std::to_string(f.den);
}

}  // namespace

ExperimentConfig resolve_config(const ConfigFile& f) {
  f.check_schema(schema());
  ExperimentConfig cfg;

  if (auto betas = f.get_doubles("model", "beta")) {
    const std::size_t groups = betas->size();
    const auto n_pop = f.get_ints("model", "n_pop");
    const auto k_obs = f.get_ints("model", "k_obs");
    if (!n_pop || !k_obs) {
      throw ParseError("[model] needs beta, n_pop and k_obs", f.find("model", "beta")->line, 1);
    }
    const auto ns = broadcast(f, "n_pop", *n_pop, groups);
    const auto ks = broadcast(f, "k_obs", *k_obs, groups);
    for (std::size_t g = 0; g < groups; ++g) {
      GroupSpec spec{(*betas)[g], ns[g], ks[g]};
      try {
        cwsubset::validate(spec);
      } catch (const DomainError& e) {
        fail(*f.find("model", "k_obs"), e.what());
      }
      cfg.model.groups.push_back(spec);
    }
    if (auto alpha = f.get_fractions("model", "alpha")) {
      cfg.alpha = broadcast(f, "alpha", *alpha, groups);
    }
  } else if (f.has_section("model")) {
    throw ParseError("[model] needs beta, n_pop and k_obs", 1, 1);
  }

  auto& iv = cfg.intervals;
  iv.b1 = f.get_double("intervals", "b1").value_or(iv.b1);
  iv.b2 = f.get_double("intervals", "b2").value_or(iv.b2);
  iv.constants.c_high = f.get_double("intervals", "c_high").value_or(iv.constants.c_high);
  iv.constants.c_low = f.get_double("intervals", "c_low").value_or(iv.constants.c_low);
  iv.constants.d_high = f.get_double("intervals", "d_high").value_or(iv.constants.d_high);
  iv.constants.d_low = f.get_double("intervals", "d_low").value_or(iv.constants.d_low);
  if (!(iv.b1 >= 0.0 && iv.b1 < 1.0 && iv.b2 > 1.0)) {
    const auto* e = f.find("intervals", "b1") ? f.find("intervals", "b1") : f.find("intervals", "b2");
    throw ParseError("intervals need 0 <= b1 < 1 < b2", e ? e->line : 1, 1);
  }

  if (auto est = f.get_strings("run", "estimators")) {
    for (const auto& name : *est) {
      if (name != "gamma" && name != "zeta" && name != "gamma2" && name != "ml_oracle") {
        fail(*f.find("run", "estimators"), "unknown estimator '" + name + "'");
      }
    }
    cfg.estimators = *est;
  }
  if (auto n = f.get_ints("run", "n_obs")) cfg.n_obs = *n;
  if (auto r = f.get_int("run", "replications")) cfg.replications = static_cast<int>(*r);
  if (auto s = f.get_u64("run", "seed")) cfg.seed = *s;
  if (auto t = f.get_int("run", "threads")) cfg.threads = static_cast<int>(*t);
  if (auto o = f.get_string("run", "out")) cfg.out_dir = *o;
  if (auto fm = f.get_string("run", "format")) {
    if (*fm != "csv" && *fm != "json") fail(*f.find("run", "format"), "format must be csv or json");
    cfg.format = *fm;
  }
  for (const char* key : {"n_obs", "replications", "threads"}) {
    const auto* e = f.find("run", key);
    if (!e) continue;
    if (std::string(key) == "n_obs") {
      for (int n : cfg.n_obs)
        if (n < 1) fail(*e, "n_obs entries must be >= 1");
    } else if (std::string(key) == "replications" && cfg.replications < 1) {
      fail(*e, "replications must be >= 1");
    } else if (std::string(key) == "threads" && cfg.threads < 1) {
      fail(*e, "threads must be >= 1");
    }
  }

  if (auto l = f.get_double("inference", "level")) {
    if (!(*l > 0.0 && *l < 1.0)) fail(*f.find("inference", "level"), "level must lie in (0, 1)");
    cfg.level = *l;
  }
  if (auto v = f.get_string("inference", "variance")) {
    if (*v != "plugin" && *v != "oracle") {
      fail(*f.find("inference", "variance"), "variance must be plugin or oracle");
    }
    cfg.variance = *v;
  }

  if (auto b = f.get_double("equivalence", "b_high")) {
    if (!(*b > 0.0)) fail(*f.find("equivalence", "b_high"), "b_high must be positive");
    cfg.equiv_b_high = *b;
  }
  if (auto b = f.get_double("equivalence", "b_low")) {
    if (!(*b > cfg.intervals.b2)) fail(*f.find("equivalence", "b_low"), "b_low must exceed b2");
    cfg.equiv_b_low = *b;
  }
  if (auto n = f.get_ints("equivalence", "n_pop")) cfg.equiv_n_pop = *n;
  if (auto k = f.get_fraction("equivalence", "k_fraction")) cfg.equiv_k_fraction = *k;

  if (auto n = f.get_ints("approx_error", "n_pop")) cfg.approx_n_pop = *n;
  if (auto b = f.get_doubles("approx_error", "beta")) cfg.approx_beta = *b;
  if (auto a = f.get_fraction("approx_error", "alpha")) cfg.approx_alpha = *a;
  if (auto k = f.get_int("approx_error", "k_max")) {
    if (*k < 1 || *k > 8) fail(*f.find("approx_error", "k_max"), "k_max must lie in [1, 8]");
    cfg.approx_k_max = static_cast<int>(*k);
  }

  if (auto br = f.get_doubles("ml_compare", "bracket")) {
    if (br->size() != 2 || !((*br)[0] < (*br)[1])) {
      fail(*f.find("ml_compare", "bracket"), "bracket needs two increasing values");
    }
    cfg.ml_bracket = {(*br)[0], (*br)[1]};
  }

  auto& cal = cfg.calibration;
  cal.b1 = f.get_double("calibration", "b1").value_or(cal.b1);
  cal.b2 = f.get_double("calibration", "b2").value_or(cal.b2);
  cal.alpha = f.get_double("calibration", "alpha").value_or(cal.alpha);
  cal.n_min = static_cast<int>(f.get_int("calibration", "n_min").value_or(cal.n_min));
  cal.n_max = static_cast<int>(f.get_int("calibration", "n_max").value_or(cal.n_max));
  cal.n_step = static_cast<int>(f.get_int("calibration", "n_step").value_or(cal.n_step));
  cal.beta_points = static_cast<int>(f.get_int("calibration", "beta_points").value_or(cal.beta_points));
  cal.low_span = f.get_double("calibration", "low_span").value_or(cal.low_span);
  if (f.has_section("calibration") && !(cal.n_min >= 2 && cal.n_step >= 1 && cal.n_max >= cal.n_min)) {
    throw ParseError("calibration grid needs 2 <= n_min <= n_max and n_step >= 1",
                     f.find("calibration", "n_min") ? f.find("calibration", "n_min")->line : 1, 1);
  }

  if (auto in = f.get_string("estimate", "input")) cfg.input = *in;
  if (auto z = f.get_string("estimate", "zero_one")) {
    if (*z != "true" && *z != "false") fail(*f.find("estimate", "zero_one"), "expected true or false");
    cfg.zero_one = *z == "true";
  }

  try {
    validate(cfg);
  } catch (const DomainError& e) {
    throw ParseError(e.what(), 1, 1);
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) { return resolve_config(ConfigFile::load(path)); }

void validate(const ExperimentConfig& cfg) {
  if (cfg.n_obs.empty()) throw DomainError("n_obs grid is empty");
  if (cfg.replications < 1) throw DomainError("replications must be >= 1");
  if (cfg.threads < 1) throw DomainError("threads must be >= 1");
  if (cfg.approx_n_pop.empty() || cfg.approx_beta.empty()) throw DomainError("approx-error grids are empty");
  if (!cfg.alpha.empty() && cfg.alpha.size() != cfg.model.size()) {
    throw DomainError("alpha needs one value per group");
  }
  for (int n : cfg.equiv_n_pop)
    if (n < 2) throw DomainError("equivalence n_pop entries must be >= 2");
  for (int n : cfg.approx_n_pop)
    if (n < 2) throw DomainError("approx-error n_pop entries must be >= 2");
}

std::string ExperimentConfig::to_text() const {
  std::ostringstream os;
  std::vector<double> betas;
  std::vector<int> ns, ks;
  for (const auto& g : model.groups) {
    betas.push_back(g.beta);
    ns.push_back(g.n_pop);
    ks.push_back(g.k_obs);
  }
  os << "[model]\n";
  os << "beta = " << join_numbers(betas) << "\n";
  os << "n_pop = " << join_ints(ns) << "\n";
  os << "k_obs = " << join_ints(ks) << "\n";
  if (!alpha.empty()) {
    os << "alpha = ";
    for (std::size_t i = 0; i < alpha.size(); ++i) os << (i ? ", " : "") << fraction_text(alpha[i]);
    os << "\n";
  }
  os << "[intervals]\n";
  os << "b1 = " << format_double(intervals.b1) << "\n";
  os << "b2 = " << format_double(intervals.b2) << "\n";
  os << "c_high = " << format_double(intervals.constants.c_high) << "\n";
  os << "c_low = " << format_double(intervals.constants.c_low) << "\n";
  os << "d_high = " << format_double(intervals.constants.d_high) << "\n";
  os << "d_low = " << format_double(intervals.constants.d_low) << "\n";
  os << "[run]\n";
  os << "estimators = ";
  for (std::size_t i = 0; i < estimators.size(); ++i) os << (i ? ", " : "") << estimators[i];
  os << "\n";
  os << "n_obs = " << join_ints(n_obs) << "\n";
  os << "replications = " << replications << "\n";
  os << "seed = " << seed << "\n";
  os << "format = " << format << "\n";
  os << "[inference]\n";
  os << "level = " << format_double(level) << "\n";
  os << "variance = " << variance << "\n";
  os << "[equivalence]\n";
  os << "b_high = " << format_double(equiv_b_high) << "\n";
  os << "b_low = " << format_double(equiv_b_low) << "\n";
  if (!equiv_n_pop.empty()) os << "n_pop = " << join_ints(equiv_n_pop) << "\n";
  os << "k_fraction = " << fraction_text(equiv_k_fraction) << "\n";
  os << "[approx_error]\n";
  os << "n_pop = " << join_ints(approx_n_pop) << "\n";
  os << "beta = " << join_numbers(approx_beta) << "\n";
  os << "alpha = " << fraction_text(approx_alpha) << "\n";
  os << "k_max = " << approx_k_max << "\n";
  os << "[ml_compare]\n";
  os << "bracket = " << format_double(ml_bracket.first) << ", " << format_double(ml_bracket.second) << "\n";
  os << "[calibration]\n";
  os << "b1 = " << format_double(calibration.b1) << "\n";
  os << "b2 = " << format_double(calibration.b2) << "\n";
  os << "alpha = " << format_double(calibration.alpha) << "\n";
  os << "n_min = " << calibration.n_min << "\n";
  os << "n_max = " << calibration.n_max << "\n";
  os << "n_step = " << calibration.n_step << "\n";
  os << "beta_points = " << calibration.beta_points << "\n";
  os << "low_span = " << format_double(calibration.low_span) << "\n";
  if (!input.empty()) {
    os << "[estimate]\n";
    os << "input = " << input << "\n";
    os << "zero_one = " << (zero_one ? "true" : "false") << "\n";
  }
  return os.str();
}

nlohmann::ordered_json ExperimentConfig::to_json() const {
  nlohmann::ordered_json j;
  j["kind"] = to_string(kind);
  auto& groups = j["model"] = nlohmann::ordered_json::array();
  for (std::size_t g = 0; g < model.size(); ++g) {
    nlohmann::ordered_json e;
    e["beta"] = model[g].beta;
    e["n_pop"] = model[g].n_pop;
    e["k_obs"] = model[g].k_obs;
    if (!alpha.empty()) e["alpha"] = fraction_text(alpha[g]);
    groups.push_back(e);
  }
  j["intervals"] = {{"b1", intervals.b1},
                    {"b2", intervals.b2},
                    {"c_high", intervals.constants.c_high},
                    {"c_low", intervals.constants.c_low},
                    {"d_high", intervals.constants.d_high},
                    {"d_low", intervals.constants.d_low}};
  j["run"] = {{"estimators", estimators}, {"n_obs", n_obs}, {"replications", replications},
              {"seed", seed}, {"format", format}};
  j["inference"] = {{"level", level}, {"variance", variance}};
  j["equivalence"] = {{"b_high", equiv_b_high}, {"b_low", equiv_b_low}, {"n_pop", equiv_n_pop},
                      {"k_fraction", fraction_text(equiv_k_fraction)}};
  j["approx_error"] = {{"n_pop", approx_n_pop}, {"beta", approx_beta},
                       {"alpha", fraction_text(approx_alpha)}, {"k_max", approx_k_max}};
  j["ml_compare"] = {{"bracket", {ml_bracket.first, ml_bracket.second}}};
  j["calibration"] = {{"b1", calibration.b1},       {"b2", calibration.b2},
                      {"alpha", calibration.alpha}, {"n_min", calibration.n_min},
                      {"n_max", calibration.n_max}, {"n_step", calibration.n_step},
                      {"beta_points", calibration.beta_points},
                      {"low_span", calibration.low_span}};
  if (!input.empty()) j["estimate"] = {{"input", input}, {"zero_one", zero_one}};
  j["version"] = kVersion;
  return j;
}

}  // namespace cwsubset::harness
