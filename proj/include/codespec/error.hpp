#ifndef CODESPEC_ERROR_HPP
#define CODESPEC_ERROR_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace codespec {

// Dimension mismatches between sequences, permutations, matrices.
class DimensionError : public std::invalid_argument {
 public:
  explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

// Mathematically undefined requests (empty set spectrum, zero-marginal
// conditioning, empty quantizer preimage, ...).
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// An exhaustive enumeration would exceed the configured budget.
class BudgetError : public std::runtime_error {
 public:
  explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input files (matrix, target pmf, simulation config).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Inconsistent run configuration (rate too low for requested output
// length, non-systematic positions, ...).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A randomized search exhausted its try budget.
class SearchError : public std::runtime_error {
 public:
  explicit SearchError(const std::string& what) : std::runtime_error(what) {}
};

// Default cap on exhaustive enumerations (number of enumerated objects).
inline constexpr std::uint64_t kDefaultBudget = std::uint64_t{1} << 20;

// Throws BudgetError when `count` objects exceed `budget`.
void check_budget(std::uint64_t count, std::uint64_t budget, const char* what);

// pow(base, exp) saturating at 2^63; used for pre-enumeration size checks.
std::uint64_t sat_pow(std::uint64_t base, std::uint32_t exp);

}  // namespace codespec

#endif
