#include "codespec/algebra.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

namespace codespec {

void check_budget(std::uint64_t count, std::uint64_t budget, const char* what) {
  if (count > budget) {
    throw BudgetError(std::string(what) + ": " + std::to_string(count) +
                      " objects exceed budget " + std::to_string(budget));
  }
}

std::uint64_t sat_pow(std::uint64_t base, std::uint32_t exp) {
  const std::uint64_t cap = std::uint64_t{1} << 63;
  std::uint64_t r = 1;
  for (std::uint32_t i = 0; i < exp; ++i) {
    if (r >= cap / (base == 0 ? 1 : base) + 1) return cap;
    r *= base;
    if (r >= cap) return cap;
  }
  return r;
}

Alphabet::Alphabet(std::uint32_t q) : q_(q) {
  static constexpr std::uint32_t primes[] = {2, 3, 5, 7, 11, 13};
  if (std::find(std::begin(primes), std::end(primes), q) == std::end(primes)) {
    throw DomainError("Alphabet: q must be prime in [2, 13], got " + std::to_string(q));
  }
}

Seq::Seq(Alphabet alphabet, std::vector<Symbol> symbols)
    : alphabet_(alphabet), symbols_(std::move(symbols)) {
  for (Symbol s : symbols_) {
    if (s >= alphabet_.q()) throw DomainError("Seq: symbol out of alphabet range");
  }
}

Seq Seq::zeros(Alphabet alphabet, std::size_t n) {
  return Seq(alphabet, std::vector<Symbol>(n, 0));
}

Seq Seq::from_index(Alphabet alphabet, std::size_t n, std::uint64_t index) {
  std::vector<Symbol> sym(n, 0);
  for (std::size_t i = n; i-- > 0;) {
    sym[i] = static_cast<Symbol>(index % alphabet.q());
    index /= alphabet.q();
  }
  return Seq(alphabet, std::move(sym));
}

std::uint64_t Seq::to_index() const {
  std::uint64_t idx = 0;
  for (Symbol s : symbols_) idx = idx * alphabet_.q() + s;
  return idx;
}

bool Seq::is_zero() const {
  return std::all_of(symbols_.begin(), symbols_.end(), [](Symbol s) { return s == 0; });
}

Seq operator+(const Seq& a, const Seq& b) {
  if (a.alphabet_ != b.alphabet_ || a.size() != b.size()) {
    throw DimensionError("Seq addition: mismatched operands");
  }
  std::vector<Symbol> sym(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) sym[i] = field_add(a[i], b[i], a.alphabet_);
  return Seq(a.alphabet_, std::move(sym));
}

Seq operator-(const Seq& a, const Seq& b) {
  if (a.alphabet_ != b.alphabet_ || a.size() != b.size()) {
    throw DimensionError("Seq subtraction: mismatched operands");
  }
  std::vector<Symbol> sym(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) sym[i] = field_sub(a[i], b[i], a.alphabet_);
  return Seq(a.alphabet_, std::move(sym));
}

std::string Seq::to_string() const {
  std::string out;
  if (alphabet_.q() <= 10) {
    out.reserve(symbols_.size());
    for (Symbol s : symbols_) out.push_back(static_cast<char>('0' + s));
  } else {
    for (std::size_t i = 0; i < symbols_.size(); ++i) {
      if (i) out.push_back(' ');
      out += std::to_string(static_cast<unsigned>(symbols_[i]));
    }
  }
  return out;
}

Seq Seq::parse(Alphabet alphabet, std::string_view text) {
  std::vector<Symbol> sym;
  if (alphabet.q() <= 10) {
    for (char c : text) {
      if (c == ' ' || c == '\t') continue;
      if (c < '0' || c > '9') throw DomainError("Seq::parse: bad digit");
      sym.push_back(static_cast<Symbol>(c - '0'));
    }
  } else {
    std::istringstream in{std::string(text)};
    unsigned v;
    while (in >> v) sym.push_back(static_cast<Symbol>(v));
  }
  return Seq(alphabet, std::move(sym));
}

Perm::Perm(std::vector<std::uint32_t> image_zero_based) : image_(std::move(image_zero_based)) {
  std::vector<bool> seen(image_.size(), false);
  for (std::uint32_t v : image_) {
    if (v >= image_.size() || seen[v]) throw DomainError("Perm: image is not a bijection");
    seen[v] = true;
  }
}

Perm Perm::identity(std::size_t n) {
  std::vector<std::uint32_t> img(n);
  std::iota(img.begin(), img.end(), 0u);
  return Perm(std::move(img));
}

Seq Perm::apply(const Seq& x) const {
  if (x.size() != image_.size()) throw DimensionError("Perm::apply: length mismatch");
  std::vector<Symbol> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[image_[i]] = x[i];
  return Seq(x.alphabet(), std::move(out));
}

Perm Perm::inverse() const {
  std::vector<std::uint32_t> inv(image_.size());
  for (std::size_t i = 0; i < image_.size(); ++i) inv[image_[i]] = static_cast<std::uint32_t>(i);
  return Perm(std::move(inv));
}

Perm Perm::compose(const Perm& other) const {
  if (size() != other.size()) throw DimensionError("Perm::compose: size mismatch");
  std::vector<std::uint32_t> img(size());
  for (std::size_t i = 0; i < size(); ++i) img[i] = image_[other.image_[i]];
  return Perm(std::move(img));
}

Matrix::Matrix(Alphabet alphabet, std::uint32_t rows, std::uint32_t cols,
               std::vector<Symbol> entries)
    : alphabet_(alphabet), rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (rows_ == 0 || cols_ == 0) throw DimensionError("Matrix: dimensions must be positive");
  if (entries_.size() != static_cast<std::size_t>(rows_) * cols_) {
    throw DimensionError("Matrix: entry count mismatch");
  }
  for (Symbol s : entries_) {
    if (s >= alphabet_.q()) throw DomainError("Matrix: entry out of alphabet range");
  }
}

Matrix Matrix::zeros(Alphabet alphabet, std::uint32_t rows, std::uint32_t cols) {
  return Matrix(alphabet, rows, cols, std::vector<Symbol>(static_cast<std::size_t>(rows) * cols, 0));
}

Matrix Matrix::identity(Alphabet alphabet, std::uint32_t n) {
  Matrix m = zeros(alphabet, n, n);
  for (std::uint32_t i = 0; i < n; ++i) m.entries_[i * n + i] = 1;
  return m;
}

Matrix Matrix::from_index(Alphabet alphabet, std::uint32_t rows, std::uint32_t cols,
                          std::uint64_t index) {
  std::vector<Symbol> entries(static_cast<std::size_t>(rows) * cols, 0);
  for (std::size_t i = entries.size(); i-- > 0;) {
    entries[i] = static_cast<Symbol>(index % alphabet.q());
    index /= alphabet.q();
  }
  return Matrix(alphabet, rows, cols, std::move(entries));
}

std::string Matrix::to_text() const {
  std::ostringstream out;
  out << alphabet_.q() << ' ' << rows_ << ' ' << cols_ << '\n';
  for (std::uint32_t r = 0; r < rows_; ++r) {
    for (std::uint32_t c = 0; c < cols_; ++c) {
      if (c) out << ' ';
      out << static_cast<unsigned>(at(r, c));
    }
    out << '\n';
  }
  return out.str();
}

Matrix Matrix::parse_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string header;
  if (!std::getline(in, header)) throw ParseError("matrix: missing header", 1);
  std::istringstream head(header);
  long long q = 0, n = 0, m = 0;
  if (!(head >> q >> n >> m)) throw ParseError("matrix: header must be 'q n m'", 1);
  std::string trailing;
  if (head >> trailing) throw ParseError("matrix: trailing tokens in header", 1);
  if (q != 2 && q != 3 && q != 5 && q != 7 && q != 11 && q != 13) {
    throw ParseError("matrix: q must be prime in [2, 13]", 1);
  }
  const Alphabet alphabet(static_cast<std::uint32_t>(q));
  if (n < 1 || m < 1) throw ParseError("matrix: dimensions must be positive", 1);
  std::vector<Symbol> entries;
  entries.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(m));
  for (long long r = 0; r < n; ++r) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("matrix: missing row", static_cast<std::size_t>(r + 2));
    std::istringstream row(line);
    for (long long c = 0; c < m; ++c) {
      long long v;
      if (!(row >> v) || v < 0 || v >= q) {
        throw ParseError("matrix: bad entry", static_cast<std::size_t>(r + 2));
      }
      entries.push_back(static_cast<Symbol>(v));
    }
    long long extra;
    if (row >> extra) throw ParseError("matrix: too many entries in row", static_cast<std::size_t>(r + 2));
  }
  return Matrix(alphabet, static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(m),
                std::move(entries));
}

Matrix Matrix::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open matrix file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_text(buf.str());
}

Seq mat_vec(const Seq& x, const Matrix& a) {
  if (x.alphabet() != a.alphabet()) throw DimensionError("mat_vec: alphabet mismatch");
  if (x.size() != a.rows()) throw DimensionError("mat_vec: length != rows");
  const std::uint32_t q = a.alphabet().q();
  std::vector<std::uint32_t> acc(a.cols(), 0);
  for (std::uint32_t r = 0; r < a.rows(); ++r) {
    const std::uint32_t xr = x[r];
    if (xr == 0) continue;
    for (std::uint32_t c = 0; c < a.cols(); ++c) {
      acc[c] += xr * a.at(r, c);
    }
  }
  std::vector<Symbol> out(a.cols());
  for (std::uint32_t c = 0; c < a.cols(); ++c) out[c] = static_cast<Symbol>(acc[c] % q);
  return Seq(x.alphabet(), std::move(out));
}

Perm random_perm(std::size_t n, Rng& rng) {
  std::vector<std::uint32_t> img(n);
  std::iota(img.begin(), img.end(), 0u);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.below(i));
    std::swap(img[i - 1], img[j]);
  }
  return Perm(std::move(img));
}

Matrix random_matrix(std::uint32_t rows, std::uint32_t cols, Alphabet alphabet, Rng& rng) {
  std::vector<Symbol> entries(static_cast<std::size_t>(rows) * cols);
  for (Symbol& e : entries) e = static_cast<Symbol>(rng.below(alphabet.q()));
  return Matrix(alphabet, rows, cols, std::move(entries));
}

Seq random_uniform_seq(std::size_t n, Alphabet alphabet, Rng& rng) {
  std::vector<Symbol> sym(n);
  for (Symbol& s : sym) s = static_cast<Symbol>(rng.below(alphabet.q()));
  return Seq(alphabet, std::move(sym));
}

std::uint64_t factorial_u64(std::uint32_t n) {
  std::uint64_t r = 1;
  for (std::uint32_t i = 2; i <= n; ++i) r *= i;
  return r;
}

std::vector<Perm> all_perms(std::size_t n, std::uint64_t budget) {
  check_budget(factorial_u64(static_cast<std::uint32_t>(n)), budget, "all_perms");
  std::vector<std::uint32_t> img(n);
  std::iota(img.begin(), img.end(), 0u);
  std::vector<Perm> out;
  do {
    out.emplace_back(img);
  } while (std::next_permutation(img.begin(), img.end()));
  return out;
}

}  // namespace codespec
