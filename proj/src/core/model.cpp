#include "cwsubset/model.hpp"

#include <numeric>
#include <string>

#include "cwsubset/errors.hpp"

namespace cwsubset {

void validate(const GroupSpec& group) {
  if (group.n_pop < 1) {
    throw DomainError("group population must be >= 1, got " + std::to_string(group.n_pop));
  }
  if (group.k_obs < 1 || group.k_obs > group.n_pop) {
    throw DomainError("observed count must satisfy 1 <= k_obs <= n_pop, got k_obs=" +
                      std::to_string(group.k_obs) + ", n_pop=" + std::to_string(group.n_pop));
  }
}

void validate(const ModelSpec& spec) {
  if (spec.groups.empty()) throw DomainError("model has no groups");
  for (const auto& g : spec.groups) validate(g);
}

}  // namespace cwsubset

namespace cwsubset {

namespace {

bool parse_digits(std::string_view text, std::int64_t& out) {
  if (text.empty() || text.size() > 17) return false;
  out = 0;
  for (char c : text) {
    if (c < '0' || c > '9') return false;
    out = out * 10 + (c - '0');
  }
  return true;
}

}  // namespace

Fraction parse_fraction(std::string_view text) {
  const auto bad = [&] { return DomainError("invalid fraction '" + std::string(text) + "'"); };
  Fraction f;
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    if (!parse_digits(text.substr(0, slash), f.num) || !parse_digits(text.substr(slash + 1), f.den)) {
      throw bad();
    }
  } else if (const auto dot = text.find('.'); dot != std::string_view::npos) {
    std::int64_t whole = 0;
    std::int64_t frac = 0;
    const auto head = text.substr(0, dot);
    const auto tail = text.substr(dot + 1);
    if ((!head.empty() && !parse_digits(head, whole)) || !parse_digits(tail, frac) || whole > 1 ||
        tail.size() > 18) {
      throw bad();
    }
    f.den = 1;
    for (std::size_t i = 0; i < tail.size(); ++i) f.den *= 10;
    f.num = whole * f.den + frac;
  } else if (!parse_digits(text, f.num)) {
    throw bad();
  }
  if (f.den == 0 || f.num > f.den) throw bad();
  const std::int64_t g = std::gcd(f.num, f.den);
  return {f.num / g, f.den / g};
}

}  // namespace cwsubset
