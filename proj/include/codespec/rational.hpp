#ifndef CODESPEC_RATIONAL_HPP
#define CODESPEC_RATIONAL_HPP

#include <cstdint>
#include <string>

#include "codespec/bigint.hpp"

namespace codespec {

// Exact rational number, always in lowest terms with positive denominator.
// All spectrum/probability arithmetic goes through this type; floating
// point enters only at the final log/entropy conversions.
class Rational {
 public:
  Rational() : num_(0), den_(1) {}
  Rational(std::int64_t value) : num_(value), den_(1) {}  // NOLINT: implicit by design
  Rational(std::int64_t num, std::int64_t den);
  Rational(BigInt num, BigInt den);
  static Rational parse(std::string_view text);  // "num/den" or "num"

  const BigInt& num() const { return num_; }
  const BigInt& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  int sign() const { return num_.sign(); }

  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  Rational operator-() const;
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  static int compare(const Rational& a, const Rational& b);
  friend bool operator==(const Rational& a, const Rational& b) { return compare(a, b) == 0; }
  friend bool operator!=(const Rational& a, const Rational& b) { return compare(a, b) != 0; }
  friend bool operator<(const Rational& a, const Rational& b) { return compare(a, b) < 0; }
  friend bool operator<=(const Rational& a, const Rational& b) { return compare(a, b) <= 0; }
  friend bool operator>(const Rational& a, const Rational& b) { return compare(a, b) > 0; }
  friend bool operator>=(const Rational& a, const Rational& b) { return compare(a, b) >= 0; }

  static Rational pow(const Rational& base, std::uint32_t exp);
  Rational abs() const;
  BigInt floor() const;

  double to_double() const;
  std::string to_string() const;  // "num/den", or "num" when den == 1

 private:
  BigInt num_;
  BigInt den_;  // > 0
  void reduce();
};

}  // namespace codespec

#endif
