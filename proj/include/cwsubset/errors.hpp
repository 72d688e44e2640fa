#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace cwsubset {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A root-finding bracket does not enclose the target.
class BracketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Work or memory would exceed the configured budget.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An exact moment falls outside the range a target map can invert.
class RangeError : public std::range_error {
 public:
  using std::range_error::range_error;
};

// A quantity required to be monotone along a bracket was not.
class MonotonicityError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : std::runtime_error(what + " (line " + std::to_string(line) +
                           ", column " + std::to_string(column) + ")"),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// The high and low bands of a regime interval system overlap.
class SeparationViolated : public std::runtime_error {
 public:
  SeparationViolated(std::size_t group, double lhs, double rhs)
      : std::runtime_error("separation condition violated for group " +
                           std::to_string(group) + ": high boundary " +
                           std::to_string(lhs) + " >= low boundary " +
                           std::to_string(rhs)),
        group_(group),
        lhs_(lhs),
        rhs_(rhs) {}

  std::size_t group() const noexcept { return group_; }
  double lhs() const noexcept { return lhs_; }
  double rhs() const noexcept { return rhs_; }

 private:
  std::size_t group_;
  double lhs_;
  double rhs_;
};

class AuditViolation : public std::runtime_error {
 public:
  AuditViolation(const std::string& what, std::uint64_t digest)
      : std::runtime_error(what), digest_(digest) {}

  std::uint64_t digest() const noexcept { return digest_; }

 private:
  std::uint64_t digest_;
};

}  // namespace cwsubset
