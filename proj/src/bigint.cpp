#include "codespec/bigint.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace codespec {

namespace {
constexpr std::uint64_t kBase = std::uint64_t{1} << 32;
}

BigInt::BigInt(std::int64_t value) {
  std::uint64_t mag;
  if (value < 0) {
    negative_ = true;
    mag = ~static_cast<std::uint64_t>(value) + 1;
  } else {
    mag = static_cast<std::uint64_t>(value);
  }
  if (mag != 0) limbs_.push_back(static_cast<std::uint32_t>(mag & 0xffffffffu));
  if (mag >> 32) limbs_.push_back(static_cast<std::uint32_t>(mag >> 32));
  if (limbs_.empty()) negative_ = false;
}

BigInt BigInt::from_uint64(std::uint64_t value) {
  BigInt r;
  if (value != 0) r.limbs_.push_back(static_cast<std::uint32_t>(value & 0xffffffffu));
  if (value >> 32) r.limbs_.push_back(static_cast<std::uint32_t>(value >> 32));
  return r;
}

BigInt BigInt::parse(std::string_view text) {
  bool neg = false;
  std::size_t pos = 0;
  if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) {
    neg = text[pos] == '-';
    ++pos;
  }
  if (pos >= text.size()) throw std::invalid_argument("BigInt::parse: empty digits");
  BigInt r;
  for (; pos < text.size(); ++pos) {
    char c = text[pos];
    if (c < '0' || c > '9') throw std::invalid_argument("BigInt::parse: bad digit");
    r = r * BigInt(10) + BigInt(c - '0');
  }
  r.negative_ = neg && !r.is_zero();
  return r;
}

void BigInt::trim() {
  while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
  if (limbs_.empty()) negative_ = false;
}

int BigInt::compare_magnitude(const BigInt& a, const BigInt& b) {
  if (a.limbs_.size() != b.limbs_.size()) return a.limbs_.size() < b.limbs_.size() ? -1 : 1;
  for (std::size_t i = a.limbs_.size(); i-- > 0;) {
    if (a.limbs_[i] != b.limbs_[i]) return a.limbs_[i] < b.limbs_[i] ? -1 : 1;
  }
  return 0;
}

BigInt BigInt::add_magnitude(const BigInt& a, const BigInt& b) {
  BigInt r;
  const std::size_t n = std::max(a.limbs_.size(), b.limbs_.size());
  r.limbs_.resize(n, 0);
  std::uint64_t carry = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t sum = carry;
    if (i < a.limbs_.size()) sum += a.limbs_[i];
    if (i < b.limbs_.size()) sum += b.limbs_[i];
    r.limbs_[i] = static_cast<std::uint32_t>(sum & 0xffffffffu);
    carry = sum >> 32;
  }
  if (carry) r.limbs_.push_back(static_cast<std::uint32_t>(carry));
  return r;
}

BigInt BigInt::sub_magnitude(const BigInt& a, const BigInt& b) {
  BigInt r;
  r.limbs_.resize(a.limbs_.size(), 0);
  std::int64_t borrow = 0;
  for (std::size_t i = 0; i < a.limbs_.size(); ++i) {
    std::int64_t diff = static_cast<std::int64_t>(a.limbs_[i]) - borrow -
                        (i < b.limbs_.size() ? static_cast<std::int64_t>(b.limbs_[i]) : 0);
    if (diff < 0) {
      diff += static_cast<std::int64_t>(kBase);
      borrow = 1;
    } else {
      borrow = 0;
    }
    r.limbs_[i] = static_cast<std::uint32_t>(diff);
  }
  r.trim();
  return r;
}

BigInt BigInt::operator-() const {
  BigInt r = *this;
  if (!r.is_zero()) r.negative_ = !r.negative_;
  return r;
}

BigInt BigInt::abs() const {
  BigInt r = *this;
  r.negative_ = false;
  return r;
}

BigInt operator+(const BigInt& a, const BigInt& b) {
  if (a.negative_ == b.negative_) {
    BigInt r = BigInt::add_magnitude(a, b);
    r.negative_ = a.negative_ && !r.is_zero();
    return r;
  }
  int cmp = BigInt::compare_magnitude(a, b);
  if (cmp == 0) return BigInt();
  BigInt r = cmp > 0 ? BigInt::sub_magnitude(a, b) : BigInt::sub_magnitude(b, a);
  r.negative_ = (cmp > 0 ? a.negative_ : b.negative_) && !r.is_zero();
  return r;
}

BigInt operator-(const BigInt& a, const BigInt& b) { return a + (-b); }

BigInt operator*(const BigInt& a, const BigInt& b) {
  if (a.is_zero() || b.is_zero()) return BigInt();
  BigInt r;
  r.limbs_.assign(a.limbs_.size() + b.limbs_.size(), 0);
  for (std::size_t i = 0; i < a.limbs_.size(); ++i) {
    std::uint64_t carry = 0;
    const std::uint64_t ai = a.limbs_[i];
    for (std::size_t j = 0; j < b.limbs_.size(); ++j) {
      std::uint64_t cur = r.limbs_[i + j] + ai * b.limbs_[j] + carry;
      r.limbs_[i + j] = static_cast<std::uint32_t>(cur & 0xffffffffu);
      carry = cur >> 32;
    }
    std::size_t k = i + b.limbs_.size();
    while (carry) {
      std::uint64_t cur = r.limbs_[k] + carry;
      r.limbs_[k] = static_cast<std::uint32_t>(cur & 0xffffffffu);
      carry = cur >> 32;
      ++k;
    }
  }
  r.trim();
  r.negative_ = (a.negative_ != b.negative_) && !r.is_zero();
  return r;
}

std::size_t BigInt::bit_length() const {
  if (limbs_.empty()) return 0;
  std::uint32_t top = limbs_.back();
  std::size_t bits = (limbs_.size() - 1) * 32;
  while (top) {
    ++bits;
    top >>= 1;
  }
  return bits;
}

bool BigInt::bit(std::size_t index) const {
  std::size_t limb = index / 32;
  if (limb >= limbs_.size()) return false;
  return (limbs_[limb] >> (index % 32)) & 1u;
}

BigInt BigInt::shifted_left(std::size_t bits) const {
  if (is_zero() || bits == 0) return *this;
  BigInt r;
  const std::size_t limb_shift = bits / 32;
  const std::size_t bit_shift = bits % 32;
  r.limbs_.assign(limbs_.size() + limb_shift + 1, 0);
  for (std::size_t i = 0; i < limbs_.size(); ++i) {
    std::uint64_t v = static_cast<std::uint64_t>(limbs_[i]) << bit_shift;
    r.limbs_[i + limb_shift] |= static_cast<std::uint32_t>(v & 0xffffffffu);
    r.limbs_[i + limb_shift + 1] |= static_cast<std::uint32_t>(v >> 32);
  }
  r.trim();
  r.negative_ = negative_;
  return r;
}

void BigInt::shift_right_one() {
  std::uint32_t carry = 0;
  for (std::size_t i = limbs_.size(); i-- > 0;) {
    std::uint32_t next = limbs_[i] & 1u;
    limbs_[i] = (limbs_[i] >> 1) | (carry << 31);
    carry = next;
  }
  trim();
}

void BigInt::divmod(const BigInt& num, const BigInt& den, BigInt& quot, BigInt& rem) {
  if (den.is_zero()) throw std::domain_error("BigInt: division by zero");
  // Binary long division on magnitudes.
  const int cmp = compare_magnitude(num, den);
  if (cmp < 0) {
    quot = BigInt();
    rem = num;
    return;
  }
  BigInt q, r;
  const std::size_t nbits = num.bit_length();
  q.limbs_.assign((nbits + 31) / 32, 0);
  BigInt dmag = den.abs();
  for (std::size_t i = nbits; i-- > 0;) {
    // r = 2r + bit_i(num)
    r = r.shifted_left(1);
    if (num.bit(i)) {
      if (r.limbs_.empty()) r.limbs_.push_back(1);
      else r.limbs_[0] |= 1u;
    }
    if (compare_magnitude(r, dmag) >= 0) {
      r = sub_magnitude(r, dmag);
      q.limbs_[i / 32] |= (1u << (i % 32));
    }
  }
  q.trim();
  r.trim();
  q.negative_ = (num.negative_ != den.negative_) && !q.is_zero();
  r.negative_ = num.negative_ && !r.is_zero();
  quot = std::move(q);
  rem = std::move(r);
}

BigInt operator/(const BigInt& a, const BigInt& b) {
  BigInt q, r;
  BigInt::divmod(a, b, q, r);
  return q;
}

BigInt operator%(const BigInt& a, const BigInt& b) {
  BigInt q, r;
  BigInt::divmod(a, b, q, r);
  return r;
}

int BigInt::compare(const BigInt& a, const BigInt& b) {
  if (a.negative_ != b.negative_) return a.negative_ ? -1 : 1;
  int cmp = compare_magnitude(a, b);
  return a.negative_ ? -cmp : cmp;
}

BigInt BigInt::gcd(BigInt a, BigInt b) {
  a.negative_ = false;
  b.negative_ = false;
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  // Stein's algorithm: only shifts, compares, and subtractions.
  std::size_t shift = 0;
  while (a.is_even() && b.is_even()) {
    a.shift_right_one();
    b.shift_right_one();
    ++shift;
  }
  while (a.is_even()) a.shift_right_one();
  while (!b.is_zero()) {
    while (b.is_even()) b.shift_right_one();
    if (compare_magnitude(a, b) > 0) std::swap(a, b);
    b = sub_magnitude(b, a);
  }
  return a.shifted_left(shift);
}

BigInt BigInt::pow(const BigInt& base, std::uint32_t exp) {
  BigInt result(1);
  BigInt cur = base;
  while (exp) {
    if (exp & 1u) result = result * cur;
    exp >>= 1;
    if (exp) cur = cur * cur;
  }
  return result;
}

BigInt BigInt::factorial(std::uint32_t n) {
  BigInt r(1);
  for (std::uint32_t i = 2; i <= n; ++i) r = r * BigInt(static_cast<std::int64_t>(i));
  return r;
}

BigInt BigInt::multinomial(std::uint32_t n, const std::vector<std::uint32_t>& parts) {
  BigInt r = factorial(n);
  for (std::uint32_t p : parts) {
    if (p > 1) r = r / factorial(p);
  }
  return r;
}

double BigInt::to_double() const {
  if (is_zero()) return 0.0;
  const std::size_t bits = bit_length();
  double value;
  if (bits <= 64) {
    std::uint64_t mag = limbs_[0];
    if (limbs_.size() > 1) mag |= static_cast<std::uint64_t>(limbs_[1]) << 32;
    value = static_cast<double>(mag);
  } else {
    // Top 64 bits scaled by the dropped exponent.
    std::uint64_t top = 0;
    const std::size_t drop = bits - 64;
    for (std::size_t i = 0; i < 64; ++i) {
      if (bit(drop + i)) top |= std::uint64_t{1} << i;
    }
    value = std::ldexp(static_cast<double>(top), static_cast<int>(drop));
  }
  return negative_ ? -value : value;
}

bool BigInt::fits_uint64() const { return !negative_ && bit_length() <= 64; }

std::uint64_t BigInt::to_uint64() const {
  if (!fits_uint64()) throw std::overflow_error("BigInt::to_uint64: out of range");
  std::uint64_t mag = limbs_.empty() ? 0 : limbs_[0];
  if (limbs_.size() > 1) mag |= static_cast<std::uint64_t>(limbs_[1]) << 32;
  return mag;
}

std::uint32_t BigInt::divmod_small(std::uint32_t divisor) {
  std::uint64_t rem = 0;
  for (std::size_t i = limbs_.size(); i-- > 0;) {
    std::uint64_t cur = (rem << 32) | limbs_[i];
    limbs_[i] = static_cast<std::uint32_t>(cur / divisor);
    rem = cur % divisor;
  }
  trim();
  return static_cast<std::uint32_t>(rem);
}

std::string BigInt::to_string() const {
  if (is_zero()) return "0";
  BigInt tmp = *this;
  std::string digits;
  while (!tmp.is_zero()) {
    std::uint32_t chunk = tmp.divmod_small(1000000000u);
    if (tmp.is_zero()) {
      while (chunk) {
        digits.push_back(static_cast<char>('0' + chunk % 10));
        chunk /= 10;
      }
    } else {
      for (int i = 0; i < 9; ++i) {
        digits.push_back(static_cast<char>('0' + chunk % 10));
        chunk /= 10;
      }
    }
  }
  if (negative_) digits.push_back('-');
  std::reverse(digits.begin(), digits.end());
  return digits;
}

}  // namespace codespec
