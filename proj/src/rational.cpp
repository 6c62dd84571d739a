#include "codespec/rational.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace codespec {

Rational::Rational(std::int64_t num, std::int64_t den) : num_(num), den_(den) { reduce(); }

Rational::Rational(BigInt num, BigInt den) : num_(std::move(num)), den_(std::move(den)) { reduce(); }

Rational Rational::parse(std::string_view text) {
  const std::size_t slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(BigInt::parse(text), BigInt(1));
  return Rational(BigInt::parse(text.substr(0, slash)), BigInt::parse(text.substr(slash + 1)));
}

void Rational::reduce() {
  if (den_.is_zero()) throw std::domain_error("Rational: zero denominator");
  if (den_.is_negative()) {
    den_ = -den_;
    num_ = -num_;
  }
  if (num_.is_zero()) {
    den_ = BigInt(1);
    return;
  }
  BigInt g = BigInt::gcd(num_, den_);
  if (g != BigInt(1)) {
    num_ = num_ / g;
    den_ = den_ / g;
  }
}

Rational operator+(const Rational& a, const Rational& b) {
  return Rational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
}

Rational operator-(const Rational& a, const Rational& b) {
  return Rational(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
}

Rational operator*(const Rational& a, const Rational& b) {
  return Rational(a.num_ * b.num_, a.den_ * b.den_);
}

Rational operator/(const Rational& a, const Rational& b) {
  if (b.is_zero()) throw std::domain_error("Rational: division by zero");
  return Rational(a.num_ * b.den_, a.den_ * b.num_);
}

Rational Rational::operator-() const {
  Rational r = *this;
  r.num_ = -r.num_;
  return r;
}

int Rational::compare(const Rational& a, const Rational& b) {
  return BigInt::compare(a.num_ * b.den_, b.num_ * a.den_);
}

Rational Rational::pow(const Rational& base, std::uint32_t exp) {
  return Rational(BigInt::pow(base.num_, exp), BigInt::pow(base.den_, exp));
}

Rational Rational::abs() const { return Rational(num_.abs(), den_); }

BigInt Rational::floor() const {
  BigInt q, r;
  BigInt::divmod(num_, den_, q, r);
  if (num_.is_negative() && !r.is_zero()) q = q - BigInt(1);
  return q;
}

double Rational::to_double() const {
  if (num_.is_zero()) return 0.0;
  const std::size_t nb = num_.bit_length();
  const std::size_t db = den_.bit_length();
  if (nb <= 62 && db <= 62) return num_.to_double() / den_.to_double();
  // Scale the numerator so the integer quotient carries ~64 significant
  // bits, then undo the scaling in the exponent.
  const std::size_t shift = (db + 64 > nb) ? (db + 64 - nb) : 0;
  const BigInt scaled = num_ * BigInt::pow(BigInt(2), static_cast<std::uint32_t>(shift));
  const BigInt q = scaled / den_;
  return std::ldexp(q.to_double(), -static_cast<int>(shift));
}

std::string Rational::to_string() const {
  if (den_ == BigInt(1)) return num_.to_string();
  return num_.to_string() + "/" + den_.to_string();
}

}  // namespace codespec
