#ifndef CODESPEC_BIGINT_HPP
#define CODESPEC_BIGINT_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace codespec {

// Arbitrary-precision signed integer, sign-magnitude with 32-bit limbs.
// Sized for desk-scale combinatorics (multinomials, q^n denominators);
// schoolbook algorithms throughout.
class BigInt {
 public:
  BigInt() = default;
  BigInt(std::int64_t value);  // NOLINT: implicit by design
  static BigInt from_uint64(std::uint64_t value);
  static BigInt parse(std::string_view text);

  bool is_zero() const { return limbs_.empty(); }
  bool is_negative() const { return negative_; }
  bool is_even() const { return limbs_.empty() || (limbs_[0] & 1u) == 0; }
  int sign() const { return is_zero() ? 0 : (negative_ ? -1 : 1); }

  BigInt operator-() const;
  BigInt abs() const;

  friend BigInt operator+(const BigInt& a, const BigInt& b);
  friend BigInt operator-(const BigInt& a, const BigInt& b);
  friend BigInt operator*(const BigInt& a, const BigInt& b);
  // Truncated quotient/remainder, remainder has the dividend's sign.
  static void divmod(const BigInt& num, const BigInt& den, BigInt& quot, BigInt& rem);
  friend BigInt operator/(const BigInt& a, const BigInt& b);
  friend BigInt operator%(const BigInt& a, const BigInt& b);

  // -1, 0, +1 as a < b, a == b, a > b.
  static int compare(const BigInt& a, const BigInt& b);
  friend bool operator==(const BigInt& a, const BigInt& b) { return compare(a, b) == 0; }
  friend bool operator!=(const BigInt& a, const BigInt& b) { return compare(a, b) != 0; }
  friend bool operator<(const BigInt& a, const BigInt& b) { return compare(a, b) < 0; }
  friend bool operator<=(const BigInt& a, const BigInt& b) { return compare(a, b) <= 0; }
  friend bool operator>(const BigInt& a, const BigInt& b) { return compare(a, b) > 0; }
  friend bool operator>=(const BigInt& a, const BigInt& b) { return compare(a, b) >= 0; }

  static BigInt gcd(BigInt a, BigInt b);  // non-negative result
  static BigInt pow(const BigInt& base, std::uint32_t exp);
  static BigInt factorial(std::uint32_t n);
  // n! / prod(parts[i]!), parts summing to n.
  static BigInt multinomial(std::uint32_t n, const std::vector<std::uint32_t>& parts);

  std::size_t bit_length() const;
  double to_double() const;
  bool fits_uint64() const;
  std::uint64_t to_uint64() const;  // throws std::overflow_error when out of range
  std::string to_string() const;

 private:
  std::vector<std::uint32_t> limbs_;  // little-endian, no leading zero limb
  bool negative_ = false;             // zero is never negative

  void trim();
  static int compare_magnitude(const BigInt& a, const BigInt& b);
  static BigInt add_magnitude(const BigInt& a, const BigInt& b);
  static BigInt sub_magnitude(const BigInt& a, const BigInt& b);  // |a| >= |b|
  BigInt shifted_left(std::size_t bits) const;
  void shift_right_one();
  bool bit(std::size_t index) const;
  std::uint32_t divmod_small(std::uint32_t divisor);  // in place, returns remainder
};

}  // namespace codespec

#endif
