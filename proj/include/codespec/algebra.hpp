#ifndef CODESPEC_ALGEBRA_HPP
#define CODESPEC_ALGEBRA_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "codespec/error.hpp"
#include "codespec/rng.hpp"

namespace codespec {

class Rng;

using Symbol = std::uint8_t;

// Prime-field alphabet Z_q, 2 <= q <= 13. Primality makes Z_q both the
// additive group and the field the random-linear-code construction needs.
class Alphabet {
 public:
  explicit Alphabet(std::uint32_t q);
  std::uint32_t q() const { return q_; }
  friend bool operator==(const Alphabet& a, const Alphabet& b) { return a.q_ == b.q_; }
  friend bool operator!=(const Alphabet& a, const Alphabet& b) { return a.q_ != b.q_; }

 private:
  std::uint32_t q_;
};

inline Symbol field_add(Symbol a, Symbol b, const Alphabet& alpha) {
  return static_cast<Symbol>((static_cast<std::uint32_t>(a) + b) % alpha.q());
}
inline Symbol field_sub(Symbol a, Symbol b, const Alphabet& alpha) {
  return static_cast<Symbol>((static_cast<std::uint32_t>(a) + alpha.q() - b) % alpha.q());
}
inline Symbol field_mul(Symbol a, Symbol b, const Alphabet& alpha) {
  return static_cast<Symbol>((static_cast<std::uint32_t>(a) * b) % alpha.q());
}
inline Symbol field_neg(Symbol a, const Alphabet& alpha) {
  return static_cast<Symbol>((alpha.q() - a) % alpha.q());
}

// Finite sequence over an alphabet.
class Seq {
 public:
  Seq(Alphabet alphabet, std::vector<Symbol> symbols);
  static Seq zeros(Alphabet alphabet, std::size_t n);
  // Sequence of lexicographic rank `index` among all q^n sequences (first
  // symbol most significant), so index order equals lexicographic order.
  static Seq from_index(Alphabet alphabet, std::size_t n, std::uint64_t index);
  std::uint64_t to_index() const;

  const Alphabet& alphabet() const { return alphabet_; }
  std::size_t size() const { return symbols_.size(); }
  Symbol operator[](std::size_t i) const { return symbols_[i]; }
  const std::vector<Symbol>& symbols() const { return symbols_; }
  bool is_zero() const;

  friend Seq operator+(const Seq& a, const Seq& b);
  friend Seq operator-(const Seq& a, const Seq& b);
  friend bool operator==(const Seq& a, const Seq& b) {
    return a.alphabet_ == b.alphabet_ && a.symbols_ == b.symbols_;
  }
  friend bool operator!=(const Seq& a, const Seq& b) { return !(a == b); }
  friend bool operator<(const Seq& a, const Seq& b) { return a.symbols_ < b.symbols_; }

  // Contiguous digit string for q <= 10, space-separated otherwise.
  std::string to_string() const;
  static Seq parse(Alphabet alphabet, std::string_view text);

 private:
  Alphabet alphabet_;
  std::vector<Symbol> symbols_;
};

// Permutation on {1..n}, stored as the forward image (0-based inside).
class Perm {
 public:
  explicit Perm(std::vector<std::uint32_t> image_zero_based);
  static Perm identity(std::size_t n);

  std::size_t size() const { return image_.size(); }
  std::uint32_t image_of(std::size_t i) const { return image_[i]; }
  const std::vector<std::uint32_t>& image() const { return image_; }

  // sigma(x): output position sigma(i) carries x_i, i.e. y_j = x_{sigma^{-1}(j)}.
  Seq apply(const Seq& x) const;
  Perm inverse() const;
  // (a.compose(b))(i) = a(b(i)), so apply(a.compose(b), x) == a.apply(b.apply(x)).
  Perm compose(const Perm& other) const;

  friend bool operator==(const Perm& a, const Perm& b) { return a.image_ == b.image_; }
  friend bool operator!=(const Perm& a, const Perm& b) { return !(a == b); }

 private:
  std::vector<std::uint32_t> image_;
};

// Dense n x m matrix over a prime field, row-major.
class Matrix {
 public:
  Matrix(Alphabet alphabet, std::uint32_t rows, std::uint32_t cols, std::vector<Symbol> entries);
  static Matrix zeros(Alphabet alphabet, std::uint32_t rows, std::uint32_t cols);
  static Matrix identity(Alphabet alphabet, std::uint32_t n);
  // Matrix of lexicographic rank `index` among all q^(n*m) matrices,
  // entries in row-major order, first entry most significant.
  static Matrix from_index(Alphabet alphabet, std::uint32_t rows, std::uint32_t cols,
                           std::uint64_t index);

  const Alphabet& alphabet() const { return alphabet_; }
  std::uint32_t rows() const { return rows_; }
  std::uint32_t cols() const { return cols_; }
  Symbol at(std::uint32_t r, std::uint32_t c) const { return entries_[r * cols_ + c]; }
  const std::vector<Symbol>& entries() const { return entries_; }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.alphabet_ == b.alphabet_ && a.rows_ == b.rows_ && a.cols_ == b.cols_ &&
           a.entries_ == b.entries_;
  }

  // File format: line 1 "q n m", then n lines of m space-separated entries.
  std::string to_text() const;
  static Matrix parse_text(std::string_view text);
  static Matrix load_file(const std::string& path);

 private:
  Alphabet alphabet_;
  std::uint32_t rows_;
  std::uint32_t cols_;
  std::vector<Symbol> entries_;
};

// Row vector times matrix over F_q; x.size() must equal A.rows().
Seq mat_vec(const Seq& x, const Matrix& a);

Perm random_perm(std::size_t n, Rng& rng);
Matrix random_matrix(std::uint32_t rows, std::uint32_t cols, Alphabet alphabet, Rng& rng);
Seq random_uniform_seq(std::size_t n, Alphabet alphabet, Rng& rng);

// All n! permutations in a fixed deterministic order (budget-guarded).
std::vector<Perm> all_perms(std::size_t n, std::uint64_t budget = kDefaultBudget);

std::uint64_t factorial_u64(std::uint32_t n);

}  // namespace codespec

#endif
