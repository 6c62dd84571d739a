#include "codespec/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace codespec {

namespace {

void validate_distribution(const std::vector<Rational>& dist, const char* what) {
  Rational total(0);
  for (const Rational& p : dist) {
    if (p.sign() < 0) throw DomainError(std::string(what) + ": negative probability");
    total += p;
  }
  if (total != Rational(1)) throw DomainError(std::string(what) + ": probabilities must sum to 1");
}

}  // namespace

ConditionalPmf ConditionalPmf::per_symbol_marginal(Alphabet v_alphabet, std::uint32_t n,
                                                   Alphabet x_alphabet, std::uint32_t m,
                                                   std::vector<Rational> px) {
  if (px.size() != x_alphabet.q()) throw DimensionError("ConditionalPmf: marginal size != qX");
  validate_distribution(px, "ConditionalPmf marginal");
  ConditionalPmf pmf(Kind::kPerSymbolMarginal, v_alphabet, n, x_alphabet, m);
  pmf.rows_.push_back(std::move(px));
  return pmf;
}

ConditionalPmf ConditionalPmf::per_symbol_conditional(
    Alphabet v_alphabet, Alphabet x_alphabet, std::uint32_t n,
    std::vector<std::vector<Rational>> px_given_v) {
  if (px_given_v.size() != v_alphabet.q()) {
    throw DimensionError("ConditionalPmf: need one row per source symbol");
  }
  for (const auto& row : px_given_v) {
    if (row.size() != x_alphabet.q()) throw DimensionError("ConditionalPmf: row size != qX");
    validate_distribution(row, "ConditionalPmf conditional row");
  }
  ConditionalPmf pmf(Kind::kPerSymbolConditional, v_alphabet, n, x_alphabet, n);
  pmf.rows_ = std::move(px_given_v);
  return pmf;
}

ConditionalPmf ConditionalPmf::full_table(Alphabet v_alphabet, std::uint32_t n,
                                          Alphabet x_alphabet, std::uint32_t m,
                                          std::vector<std::vector<Rational>> table) {
  const std::uint64_t v_count = sat_pow(v_alphabet.q(), n);
  const std::uint64_t x_count = sat_pow(x_alphabet.q(), m);
  if (table.size() != v_count) throw DimensionError("ConditionalPmf: need one row per v");
  for (const auto& row : table) {
    if (row.size() != x_count) throw DimensionError("ConditionalPmf: row size != qX^m");
    validate_distribution(row, "ConditionalPmf table row");
  }
  ConditionalPmf pmf(Kind::kFullTable, v_alphabet, n, x_alphabet, m);
  pmf.rows_ = std::move(table);
  return pmf;
}

Rational ConditionalPmf::prob(const Seq& x, const Seq& v) const {
  if (x.size() != m_ || v.size() != n_) throw DimensionError("ConditionalPmf::prob: bad lengths");
  switch (kind_) {
    case Kind::kPerSymbolMarginal: {
      Rational p(1);
      for (std::size_t j = 0; j < x.size(); ++j) p *= rows_[0][x[j]];
      return p;
    }
    case Kind::kPerSymbolConditional: {
      Rational p(1);
      for (std::size_t j = 0; j < x.size(); ++j) p *= rows_[v[j]][x[j]];
      return p;
    }
    case Kind::kFullTable:
      return rows_[v.to_index()][x.to_index()];
  }
  throw DomainError("ConditionalPmf::prob: bad kind");
}

Rational ConditionalPmf::letter_prob(Symbol x, Symbol v) const {
  switch (kind_) {
    case Kind::kPerSymbolMarginal:
      return rows_[0][x];
    case Kind::kPerSymbolConditional:
      return rows_[v][x];
    case Kind::kFullTable:
      throw DomainError("ConditionalPmf::letter_prob: full table is not factorized");
  }
  throw DomainError("ConditionalPmf::letter_prob: bad kind");
}

const std::vector<Rational>& ConditionalPmf::marginal_row() const {
  if (kind_ != Kind::kPerSymbolMarginal) throw DomainError("ConditionalPmf: not a marginal pmf");
  return rows_[0];
}

const std::vector<Rational>& ConditionalPmf::conditional_row(Symbol v) const {
  if (kind_ != Kind::kPerSymbolConditional) {
    throw DomainError("ConditionalPmf: not a per-symbol conditional pmf");
  }
  return rows_[v];
}

const std::vector<Rational>& ConditionalPmf::table_row(std::uint64_t v_index) const {
  if (kind_ != Kind::kFullTable) throw DomainError("ConditionalPmf: not a full table");
  return rows_[v_index];
}

std::string ConditionalPmf::to_text() const {
  std::ostringstream out;
  out << v_alphabet_.q() << ' ' << n_ << ' ' << x_alphabet_.q() << ' ' << m_;
  if (suggested_l_) out << ' ' << *suggested_l_;
  out << '\n';
  if (kind_ == Kind::kPerSymbolMarginal) {
    for (std::uint32_t x = 0; x < x_alphabet_.q(); ++x) {
      out << x << ' ' << rows_[0][x].num().to_string() << ' ' << rows_[0][x].den().to_string()
          << '\n';
    }
  } else if (kind_ == Kind::kFullTable) {
    for (std::uint64_t vi = 0; vi < rows_.size(); ++vi) {
      const Seq v = Seq::from_index(v_alphabet_, n_, vi);
      for (std::uint64_t xi = 0; xi < rows_[vi].size(); ++xi) {
        if (rows_[vi][xi].is_zero()) continue;
        const Seq x = Seq::from_index(x_alphabet_, m_, xi);
        out << v.to_string() << ' ' << x.to_string() << ' ' << rows_[vi][xi].num().to_string()
            << ' ' << rows_[vi][xi].den().to_string() << '\n';
      }
    }
  } else {
    throw DomainError("ConditionalPmf::to_text: per-symbol conditional has no file form");
  }
  return out.str();
}

ConditionalPmf ConditionalPmf::parse_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      const auto pos = line.find_first_not_of(" \t\r");
      if (pos == std::string::npos || line[pos] == '#') continue;
      return true;
    }
    return false;
  };
  if (!next_line()) throw ParseError("pmf: missing header", 1);
  std::istringstream head(line);
  long long qv = 0, n = 0, qx = 0, m = 0;
  if (!(head >> qv >> n >> qx >> m)) throw ParseError("pmf: header must be 'qV n qX m [l]'", line_no);
  long long l = -1;
  head >> l;
  auto make_alphabet = [&](long long q) {
    if (q != 2 && q != 3 && q != 5 && q != 7 && q != 11 && q != 13) {
      throw ParseError("pmf: alphabet size must be prime in [2, 13]", line_no);
    }
    return Alphabet(static_cast<std::uint32_t>(q));
  };
  const Alphabet v_alpha = make_alphabet(qv);
  const Alphabet x_alpha = make_alphabet(qx);
  if (n < 1 || m < 1) throw ParseError("pmf: lengths must be positive", line_no);

  std::vector<std::vector<std::string>> rows;
  while (next_line()) {
    std::istringstream row(line);
    std::vector<std::string> tokens;
    std::string tok;
    while (row >> tok) tokens.push_back(tok);
    rows.push_back(std::move(tokens));
  }
  if (rows.empty()) throw ParseError("pmf: no rows", line_no);

  const bool marginal = rows.front().size() == 3;
  ConditionalPmf pmf(Kind::kPerSymbolMarginal, v_alpha, static_cast<std::uint32_t>(n), x_alpha,
                     static_cast<std::uint32_t>(m));
  if (marginal) {
    std::vector<Rational> px(x_alpha.q(), Rational(0));
    for (const auto& tokens : rows) {
      if (tokens.size() != 3) throw ParseError("pmf: marginal rows need 'x num den'", line_no);
      const long long x = std::stoll(tokens[0]);
      if (x < 0 || x >= qx) throw ParseError("pmf: symbol out of range", line_no);
      px[static_cast<std::size_t>(x)] =
          Rational(BigInt::parse(tokens[1]), BigInt::parse(tokens[2]));
    }
    pmf = per_symbol_marginal(v_alpha, static_cast<std::uint32_t>(n), x_alpha,
                              static_cast<std::uint32_t>(m), std::move(px));
  } else {
    if (qv > 10 || qx > 10) throw ParseError("pmf: full-table rows require q <= 10", line_no);
    const std::uint64_t v_count = sat_pow(v_alpha.q(), static_cast<std::uint32_t>(n));
    const std::uint64_t x_count = sat_pow(x_alpha.q(), static_cast<std::uint32_t>(m));
    check_budget(v_count, kDefaultBudget, "pmf table rows");
    check_budget(x_count, kDefaultBudget, "pmf table cols");
    std::vector<std::vector<Rational>> table(v_count,
                                             std::vector<Rational>(x_count, Rational(0)));
    for (const auto& tokens : rows) {
      if (tokens.size() != 4) throw ParseError("pmf: table rows need 'v x num den'", line_no);
      const Seq v = Seq::parse(v_alpha, tokens[0]);
      const Seq x = Seq::parse(x_alpha, tokens[1]);
      if (v.size() != static_cast<std::size_t>(n) || x.size() != static_cast<std::size_t>(m)) {
        throw ParseError("pmf: sequence length mismatch", line_no);
      }
      table[v.to_index()][x.to_index()] =
          Rational(BigInt::parse(tokens[2]), BigInt::parse(tokens[3]));
    }
    pmf = full_table(v_alpha, static_cast<std::uint32_t>(n), x_alpha,
                     static_cast<std::uint32_t>(m), std::move(table));
  }
  if (l >= 1) pmf.set_suggested_l(static_cast<std::uint32_t>(l));
  return pmf;
}

ConditionalPmf ConditionalPmf::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open pmf file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_text(buf.str());
}

std::vector<BigInt> largest_remainder(const std::vector<Rational>& dist, const BigInt& slots) {
  const Rational total_slots(slots, BigInt(1));
  std::vector<BigInt> counts(dist.size());
  std::vector<Rational> remainders(dist.size());
  BigInt assigned(0);
  for (std::size_t i = 0; i < dist.size(); ++i) {
    const Rational share = dist[i] * total_slots;
    counts[i] = share.floor();
    remainders[i] = share - Rational(counts[i], BigInt(1));
    assigned = assigned + counts[i];
  }
  BigInt leftover = slots - assigned;
  std::vector<std::size_t> order(dist.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return remainders[a] > remainders[b];  // ties keep smaller index first
  });
  for (std::size_t k = 0; !leftover.is_zero(); ++k) {
    counts[order[k]] = counts[order[k]] + BigInt(1);
    leftover = leftover - BigInt(1);
  }
  return counts;
}

namespace {

std::vector<Symbol> expand_block_map(const std::vector<std::uint64_t>& counts,
                                     std::uint64_t block_count) {
  std::vector<Symbol> map;
  map.reserve(block_count);
  for (std::size_t x = 0; x < counts.size(); ++x) {
    for (std::uint64_t k = 0; k < counts[x]; ++k) map.push_back(static_cast<Symbol>(x));
  }
  if (map.size() != block_count) throw DomainError("Quantizer: slot counts must cover the block");
  return map;
}

}  // namespace

Quantizer Quantizer::blockwise_marginal(Alphabet v_alphabet, std::uint32_t n, Alphabet u_alphabet,
                                        std::uint32_t l, Alphabet x_alphabet, std::uint32_t m,
                                        std::uint32_t l0,
                                        std::vector<std::uint64_t> slot_counts) {
  if (l0 == 0 || static_cast<std::uint64_t>(m) * l0 > l) {
    throw ConfigError("Quantizer: m * l0 must fit within l");
  }
  Quantizer q(Kind::kBlockwiseMarginal, v_alphabet, n, u_alphabet, l, x_alphabet, m);
  q.l0_ = l0;
  const std::uint64_t block_count = sat_pow(u_alphabet.q(), l0);
  q.block_map_.push_back(expand_block_map(slot_counts, block_count));
  q.counts_.push_back(std::move(slot_counts));
  return q;
}

Quantizer Quantizer::blockwise_conditional(Alphabet v_alphabet, Alphabet u_alphabet,
                                           std::uint32_t l, Alphabet x_alphabet, std::uint32_t n,
                                           std::uint32_t l0,
                                           std::vector<std::vector<std::uint64_t>> slot_counts) {
  if (l0 == 0 || static_cast<std::uint64_t>(n) * l0 > l) {
    throw ConfigError("Quantizer: n * l0 must fit within l");
  }
  if (slot_counts.size() != v_alphabet.q()) {
    throw DimensionError("Quantizer: need slot counts per source symbol");
  }
  Quantizer q(Kind::kBlockwiseConditional, v_alphabet, n, u_alphabet, l, x_alphabet, n);
  q.l0_ = l0;
  const std::uint64_t block_count = sat_pow(u_alphabet.q(), l0);
  for (auto& counts : slot_counts) {
    q.block_map_.push_back(expand_block_map(counts, block_count));
    q.counts_.push_back(std::move(counts));
  }
  return q;
}

Quantizer Quantizer::full_table(Alphabet v_alphabet, std::uint32_t n, Alphabet u_alphabet,
                                std::uint32_t l, Alphabet x_alphabet, std::uint32_t m,
                                std::vector<std::vector<std::uint32_t>> assignment) {
  const std::uint64_t v_count = sat_pow(v_alphabet.q(), n);
  const std::uint64_t u_count = sat_pow(u_alphabet.q(), l);
  const std::uint64_t x_count = sat_pow(x_alphabet.q(), m);
  if (assignment.size() != v_count) throw DimensionError("Quantizer: need one row per v");
  Quantizer q(Kind::kFullTable, v_alphabet, n, u_alphabet, l, x_alphabet, m);
  q.table_counts_.assign(v_count, std::vector<std::uint64_t>(x_count, 0));
  for (std::uint64_t vi = 0; vi < v_count; ++vi) {
    if (assignment[vi].size() != u_count) throw DimensionError("Quantizer: row size != qU^l");
    for (std::uint32_t xi : assignment[vi]) {
      if (xi >= x_count) throw DomainError("Quantizer: assignment out of range");
      ++q.table_counts_[vi][xi];
    }
  }
  q.assignment_ = std::move(assignment);
  return q;
}

Seq Quantizer::evaluate(const Seq& v, const Seq& u) const {
  if (v.size() != n_ || v.alphabet() != v_alphabet_) {
    throw DimensionError("Quantizer::evaluate: bad source word");
  }
  if (u.size() != l_ || u.alphabet() != u_alphabet_) {
    throw DimensionError("Quantizer::evaluate: bad coded word");
  }
  if (kind_ == Kind::kFullTable) {
    return Seq::from_index(x_alphabet_, m_, assignment_[v.to_index()][u.to_index()]);
  }
  std::vector<Symbol> out(m_);
  const std::uint32_t qu = u_alphabet_.q();
  for (std::uint32_t j = 0; j < m_; ++j) {
    std::uint64_t block = 0;
    for (std::uint32_t t = 0; t < l0_; ++t) block = block * qu + u[j * l0_ + t];
    const std::vector<Symbol>& map =
        kind_ == Kind::kBlockwiseMarginal ? block_map_[0] : block_map_[v[j]];
    out[j] = map[block];
  }
  return Seq(x_alphabet_, std::move(out));
}

Symbol Quantizer::evaluate_block(Symbol v_sym, std::uint64_t block_rank) const {
  if (kind_ == Kind::kFullTable) {
    throw DomainError("Quantizer::evaluate_block: full table has no block map");
  }
  const std::vector<Symbol>& map =
      kind_ == Kind::kBlockwiseMarginal ? block_map_[0] : block_map_[v_sym];
  return map[block_rank];
}

BigInt Quantizer::slot_count(const Seq& v, const Seq& x) const {
  if (x.size() != m_ || v.size() != n_) throw DimensionError("Quantizer::slot_count: bad lengths");
  if (kind_ == Kind::kFullTable) {
    return BigInt::from_uint64(table_counts_[v.to_index()][x.to_index()]);
  }
  BigInt count(1);
  for (std::uint32_t j = 0; j < m_; ++j) {
    const std::vector<std::uint64_t>& counts =
        kind_ == Kind::kBlockwiseMarginal ? counts_[0] : counts_[v[j]];
    count = count * BigInt::from_uint64(counts[x[j]]);
    if (count.is_zero()) return count;
  }
  // Discarded tail symbols are free.
  const std::uint32_t tail = l_ - m_ * l0_;
  return count * BigInt::pow(BigInt(u_alphabet_.q()), tail);
}

Rational Quantizer::realized_prob(const Seq& x, const Seq& v) const {
  return Rational(slot_count(v, x), BigInt::pow(BigInt(u_alphabet_.q()), l_));
}

Rational Quantizer::per_symbol_prob(Symbol x, Symbol v) const {
  if (kind_ == Kind::kFullTable) {
    throw DomainError("Quantizer::per_symbol_prob: full table is not factorized");
  }
  const std::vector<std::uint64_t>& counts =
      kind_ == Kind::kBlockwiseMarginal ? counts_[0] : counts_[v];
  return Rational(BigInt::from_uint64(counts[x]), BigInt::pow(BigInt(u_alphabet_.q()), l0_));
}

std::vector<Seq> Quantizer::preimage(const Seq& v, const Seq& x, std::uint64_t budget) const {
  const std::uint64_t u_count = sat_pow(u_alphabet_.q(), l_);
  check_budget(u_count, budget, "Quantizer::preimage");
  std::vector<Seq> pre;
  for (std::uint64_t ui = 0; ui < u_count; ++ui) {
    Seq u = Seq::from_index(u_alphabet_, l_, ui);
    if (evaluate(v, u) == x) pre.push_back(std::move(u));
  }
  return pre;
}

namespace {

struct ApportionResult {
  std::vector<std::uint64_t> counts;
  Rational tv;
  bool starved = false;
};

ApportionResult apportion(const std::vector<Rational>& target, const BigInt& slots) {
  ApportionResult result;
  const std::vector<BigInt> counts = largest_remainder(target, slots);
  Rational tv(0);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    result.counts.push_back(counts[i].to_uint64());
    const Rational realized(counts[i], slots);
    tv += (realized - target[i]).abs();
    if (counts[i].is_zero() && target[i].sign() > 0) result.starved = true;
  }
  result.tv = tv / Rational(2);
  return result;
}

}  // namespace

QuantizerBuild build_quantizer(const ConditionalPmf& target, Alphabet u_alphabet, std::uint32_t l,
                               std::uint64_t budget) {
  if (l < 1) throw ConfigError("build_quantizer: l must be >= 1");
  const Alphabet v_alpha = target.v_alphabet();
  const Alphabet x_alpha = target.x_alphabet();
  const std::uint32_t n = target.n();
  const std::uint32_t m = target.m();

  if (target.kind() == ConditionalPmf::Kind::kFullTable) {
    const std::uint64_t v_count = sat_pow(v_alpha.q(), n);
    const std::uint64_t u_count = sat_pow(u_alphabet.q(), l);
    const std::uint64_t x_count = sat_pow(x_alpha.q(), m);
    check_budget(v_count * u_count, budget, "build_quantizer full table");
    const BigInt slots = BigInt::from_uint64(u_count);
    std::vector<std::vector<std::uint32_t>> assignment(v_count);
    Rational max_tv(0);
    bool starved = false;
    std::vector<QuantizerCellError> cells;
    for (std::uint64_t vi = 0; vi < v_count; ++vi) {
      const ApportionResult res = apportion(target.table_row(vi), slots);
      if (res.tv > max_tv) max_tv = res.tv;
      starved = starved || res.starved;
      const Seq v = Seq::from_index(v_alpha, n, vi);
      for (std::uint64_t xi = 0; xi < x_count; ++xi) {
        const Rational realized(BigInt::from_uint64(res.counts[xi]), slots);
        const Rational& want = target.table_row(vi)[xi];
        if (realized != want || want.sign() > 0) {
          cells.push_back({v.to_string(), Seq::from_index(x_alpha, m, xi).to_string(), realized,
                           want, (realized - want).abs()});
        }
      }
      // Slots in lexicographic u order, outputs in lexicographic x order.
      std::vector<std::uint32_t> row;
      row.reserve(u_count);
      for (std::uint64_t xi = 0; xi < x_count; ++xi) {
        for (std::uint64_t k = 0; k < res.counts[xi]; ++k) row.push_back(static_cast<std::uint32_t>(xi));
      }
      assignment[vi] = std::move(row);
    }
    QuantizerBuild build{Quantizer::full_table(v_alpha, n, u_alphabet, l, x_alpha, m,
                                               std::move(assignment)),
                         max_tv, starved, std::move(cells)};
    return build;
  }

  if (l < m) throw ConfigError("build_quantizer: factorized targets need l >= m");
  const std::uint32_t l0 = l / m;
  const BigInt slots = BigInt::pow(BigInt(u_alphabet.q()), l0);
  if (target.kind() == ConditionalPmf::Kind::kPerSymbolMarginal) {
    const ApportionResult res = apportion(target.marginal_row(), slots);
    std::vector<QuantizerCellError> cells;
    for (std::uint32_t x = 0; x < x_alpha.q(); ++x) {
      const Rational realized(BigInt::from_uint64(res.counts[x]), slots);
      cells.push_back({"", std::to_string(x), realized, target.marginal_row()[x],
                       (realized - target.marginal_row()[x]).abs()});
    }
    return QuantizerBuild{Quantizer::blockwise_marginal(v_alpha, n, u_alphabet, l, x_alpha, m, l0,
                                                        res.counts),
                          res.tv, res.starved, std::move(cells)};
  }

  // Per-symbol conditional: one apportionment per source symbol.
  std::vector<std::vector<std::uint64_t>> counts;
  Rational max_tv(0);
  bool starved = false;
  std::vector<QuantizerCellError> cells;
  for (std::uint32_t v = 0; v < v_alpha.q(); ++v) {
    const ApportionResult res = apportion(target.conditional_row(static_cast<Symbol>(v)), slots);
    if (res.tv > max_tv) max_tv = res.tv;
    starved = starved || res.starved;
    for (std::uint32_t x = 0; x < x_alpha.q(); ++x) {
      const Rational realized(BigInt::from_uint64(res.counts[x]), slots);
      const Rational& want = target.conditional_row(static_cast<Symbol>(v))[x];
      cells.push_back({std::to_string(v), std::to_string(x), realized, want,
                       (realized - want).abs()});
    }
    counts.push_back(res.counts);
  }
  return QuantizerBuild{Quantizer::blockwise_conditional(v_alpha, u_alphabet, l, x_alpha, n, l0,
                                                         std::move(counts)),
                        max_tv, starved, std::move(cells)};
}

JsccEncoder::JsccEncoder(Quantizer quantizer, RandomizedAffineCode randomization)
    : quantizer_(std::move(quantizer)), randomization_(std::move(randomization)) {
  if (randomization_.base().input_length() != quantizer_.n() ||
      randomization_.base().output_length() != quantizer_.l() ||
      randomization_.base().alphabet() != quantizer_.u_alphabet()) {
    throw DimensionError("JsccEncoder: code and quantizer dimensions do not match");
  }
}

JsccEncoder JsccEncoder::draw(const LinearCode& code, Quantizer quantizer, Rng& rng) {
  return JsccEncoder(std::move(quantizer), RandomizedAffineCode::draw(code, rng));
}

Rational beta(const AlphaTable& alpha, const Quantizer& quantizer, const Seq& v, const Seq& v_hat,
              const Seq& x, const Seq& x_hat, std::uint64_t budget) {
  if (v == v_hat) throw DomainError("beta: v and v_hat must differ");
  const std::vector<Seq> pre = quantizer.preimage(v, x, budget);
  const std::vector<Seq> pre_hat = quantizer.preimage(v_hat, x_hat, budget);
  if (pre.empty() || pre_hat.empty()) throw DomainError("beta: empty quantizer preimage");
  const TypeVector diff_v = type_of(v_hat - v);
  Rational sum(0);
  for (const Seq& u : pre) {
    for (const Seq& u_hat : pre_hat) {
      sum += alpha.at(diff_v, type_of(u_hat - u));
    }
  }
  return sum / Rational(BigInt::from_uint64(pre.size()) * BigInt::from_uint64(pre_hat.size()),
                        BigInt(1));
}

Rational beta_prime(const AlphaTable& alpha, const Quantizer& quantizer, const Seq& v_hat,
                    const Seq& x_hat, std::uint64_t budget) {
  const std::vector<Seq> pre_hat = quantizer.preimage(v_hat, x_hat, budget);
  if (pre_hat.empty()) throw DomainError("beta_prime: empty quantizer preimage");
  const Alphabet v_alpha = quantizer.v_alphabet();
  const Alphabet u_alpha = quantizer.u_alphabet();
  const std::uint64_t u_count = sat_pow(u_alpha.q(), quantizer.l());
  check_budget(u_count, budget, "beta_prime");
  const Rational denom(BigInt::from_uint64(pre_hat.size()), BigInt(1));

  Rational best(0);
  bool first = true;
  for (const TypeVector& p : all_types(v_alpha, quantizer.n())) {
    if (p.is_zero_type()) continue;
    for (std::uint64_t ui = 0; ui < u_count; ++ui) {
      const Seq u = Seq::from_index(u_alpha, quantizer.l(), ui);
      Rational sum(0);
      for (const Seq& u_hat : pre_hat) {
        sum += alpha.at(p, type_of(u_hat - u));
      }
      const Rational avg = sum / denom;
      if (first || avg > best) {
        best = avg;
        first = false;
      }
    }
  }
  return best;
}

RhoReport rho_encoder(const AlphaTable& alpha, const Quantizer& quantizer, std::uint64_t budget) {
  const std::uint64_t v_count = sat_pow(quantizer.v_alphabet().q(), quantizer.n());
  const std::uint64_t x_count = sat_pow(quantizer.x_alphabet().q(), quantizer.m());
  check_budget(v_count * x_count, budget, "rho_encoder");
  RhoReport report;
  bool first = true;
  for (std::uint64_t vi = 0; vi < v_count; ++vi) {
    const Seq v_hat = Seq::from_index(quantizer.v_alphabet(), quantizer.n(), vi);
    for (std::uint64_t xi = 0; xi < x_count; ++xi) {
      const Seq x_hat = Seq::from_index(quantizer.x_alphabet(), quantizer.m(), xi);
      if (quantizer.slot_count(v_hat, x_hat).is_zero()) continue;
      const Rational bp = beta_prime(alpha, quantizer, v_hat, x_hat, budget);
      if (first || bp > report.max_beta_prime) {
        report.max_beta_prime = bp;
        report.arg_v_index = vi;
        report.arg_x_index = xi;
        first = false;
      }
    }
  }
  if (first) throw DomainError("rho_encoder: quantizer has no reachable outputs");
  report.rho = std::log(report.max_beta_prime.to_double()) / quantizer.n();
  return report;
}

EncoderLawTable EncoderLawTable::from_linear_ensemble(const CodeEnsemble& ensemble,
                                                      const Quantizer& quantizer,
                                                      std::uint64_t budget) {
  if (ensemble.input_length() != quantizer.n() || ensemble.output_length() != quantizer.l() ||
      ensemble.alphabet() != quantizer.u_alphabet()) {
    throw DimensionError("EncoderLawTable: ensemble and quantizer dimensions do not match");
  }
  const Alphabet v_alpha = quantizer.v_alphabet();
  const Alphabet u_alpha = quantizer.u_alphabet();
  const std::uint32_t n = quantizer.n();
  const std::uint32_t l = quantizer.l();
  const std::uint64_t v_count = sat_pow(v_alpha.q(), n);
  const std::uint64_t u_count = sat_pow(u_alpha.q(), l);
  const std::uint64_t x_count = sat_pow(quantizer.x_alphabet().q(), quantizer.m());

  const auto members = ensemble.enumerate(budget);
  const std::uint64_t perms = factorial_u64(n) * factorial_u64(l);
  check_budget(members.size() * perms * u_count, budget, "EncoderLawTable randomizations");
  check_budget(v_count * x_count, budget, "EncoderLawTable state space");

  BigInt common_den(1);
  for (const auto& [code, w] : members) {
    if (!(common_den % w.den()).is_zero()) common_den = common_den * w.den();
  }
  std::vector<std::uint64_t> weight(members.size());
  for (std::size_t i = 0; i < members.size(); ++i) {
    weight[i] = (members[i].second.num() * (common_den / members[i].second.den())).to_uint64();
  }

  std::vector<Seq> vs, us;
  for (std::uint64_t i = 0; i < v_count; ++i) vs.push_back(Seq::from_index(v_alpha, n, i));
  for (std::uint64_t i = 0; i < u_count; ++i) us.push_back(Seq::from_index(u_alpha, l, i));
  const auto sigmas_in = all_perms(n, budget);
  const auto sigmas_out = all_perms(l, budget);

  std::vector<std::uint64_t> singles(v_count * x_count, 0);
  std::vector<std::uint64_t> pairs(v_count * x_count * v_count * x_count, 0);
  std::vector<std::uint32_t> phi(v_count);
  std::uint64_t total_weight = 0;

  for (std::size_t mi = 0; mi < members.size(); ++mi) {
    if (weight[mi] == 0) continue;
    const LinearCode& code = members[mi].first;
    for (const Perm& si : sigmas_in) {
      for (const Perm& so : sigmas_out) {
        for (std::uint64_t ci = 0; ci < u_count; ++ci) {
          const RandomizedAffineCode rc(code, si, so, us[ci]);
          for (std::uint64_t vi = 0; vi < v_count; ++vi) {
            phi[vi] = static_cast<std::uint32_t>(
                quantizer.evaluate(vs[vi], rc.evaluate(vs[vi])).to_index());
          }
          const std::uint64_t w = weight[mi];
          total_weight += w;
          for (std::uint64_t vi = 0; vi < v_count; ++vi) {
            singles[vi * x_count + phi[vi]] += w;
            const std::uint64_t base = (vi * x_count + phi[vi]) * v_count * x_count;
            for (std::uint64_t vh = 0; vh < v_count; ++vh) {
              pairs[base + vh * x_count + phi[vh]] += w;
            }
          }
        }
      }
    }
  }

  EncoderLawTable law;
  law.n_ = n;
  law.v_count_ = v_count;
  law.x_count_ = x_count;
  const BigInt total = BigInt::from_uint64(total_weight);
  law.singles_.resize(singles.size());
  for (std::size_t i = 0; i < singles.size(); ++i) {
    law.singles_[i] = Rational(BigInt::from_uint64(singles[i]), total);
  }
  law.pairs_.resize(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    law.pairs_[i] = Rational(BigInt::from_uint64(pairs[i]), total);
  }
  return law;
}

EncoderLawTable EncoderLawTable::from_product_pmf(const ConditionalPmf& pmf,
                                                  std::uint64_t budget) {
  const std::uint64_t v_count = sat_pow(pmf.v_alphabet().q(), pmf.n());
  const std::uint64_t x_count = sat_pow(pmf.x_alphabet().q(), pmf.m());
  check_budget(v_count, budget, "EncoderLawTable domain");
  const std::uint64_t functions = sat_pow(x_count, static_cast<std::uint32_t>(v_count));
  check_budget(functions, budget, "EncoderLawTable function space");

  std::vector<std::vector<Rational>> p(v_count, std::vector<Rational>(x_count));
  for (std::uint64_t vi = 0; vi < v_count; ++vi) {
    const Seq v = Seq::from_index(pmf.v_alphabet(), pmf.n(), vi);
    for (std::uint64_t xi = 0; xi < x_count; ++xi) {
      p[vi][xi] = pmf.prob(Seq::from_index(pmf.x_alphabet(), pmf.m(), xi), v);
    }
  }

  EncoderLawTable law;
  law.n_ = pmf.n();
  law.v_count_ = v_count;
  law.x_count_ = x_count;
  law.singles_.assign(v_count * x_count, Rational(0));
  law.pairs_.assign(v_count * x_count * v_count * x_count, Rational(0));

  std::vector<std::uint64_t> assign(v_count, 0);
  for (std::uint64_t f = 0; f < functions; ++f) {
    std::uint64_t rem = f;
    Rational w(1);
    for (std::uint64_t vi = 0; vi < v_count; ++vi) {
      assign[vi] = rem % x_count;
      rem /= x_count;
      w *= p[vi][assign[vi]];
    }
    if (w.is_zero()) continue;
    for (std::uint64_t vi = 0; vi < v_count; ++vi) {
      law.singles_[vi * x_count + assign[vi]] += w;
      const std::uint64_t base = (vi * x_count + assign[vi]) * v_count * x_count;
      for (std::uint64_t vh = 0; vh < v_count; ++vh) {
        law.pairs_[base + vh * x_count + assign[vh]] += w;
      }
    }
  }
  return law;
}

Rational EncoderLawTable::marginal(std::uint64_t v_index, std::uint64_t x_index) const {
  return singles_[v_index * x_count_ + x_index];
}

Rational EncoderLawTable::joint(std::uint64_t v_index, std::uint64_t x_index,
                                std::uint64_t v_hat_index, std::uint64_t x_hat_index) const {
  return pairs_[(v_index * x_count_ + x_index) * v_count_ * x_count_ + v_hat_index * x_count_ +
                x_hat_index];
}

double rho_max_single(const EncoderLawTable& law) {
  Rational best(0);
  bool first = true;
  for (std::uint64_t vh = 0; vh < law.v_count(); ++vh) {
    for (std::uint64_t xh = 0; xh < law.x_count(); ++xh) {
      const Rational marg = law.marginal(vh, xh);
      if (marg.is_zero()) continue;  // rho defined as 0 on unreachable pairs
      for (std::uint64_t v = 0; v < law.v_count(); ++v) {
        if (v == vh) continue;
        for (std::uint64_t x = 0; x < law.x_count(); ++x) {
          const Rational cond_base = law.marginal(v, x);
          if (cond_base.is_zero()) continue;
          const Rational ratio = (law.joint(v, x, vh, xh) / cond_base) / marg;
          if (first || ratio > best) {
            best = ratio;
            first = false;
          }
        }
      }
    }
  }
  if (first) return 0.0;
  return std::log(best.to_double()) / law.n();
}

double rho_max(const EncoderLawTable& law, std::uint32_t subset_size) {
  return subset_size * rho_max_single(law);
}

EncoderLawReport verify_encoder_law(const CodeEnsemble& ensemble, const Quantizer& quantizer,
                                    std::uint64_t budget) {
  const EncoderLawTable law = EncoderLawTable::from_linear_ensemble(ensemble, quantizer, budget);
  const AlphaTable alpha = alpha_table(ensemble, SpectrumMethod::kEnumerate, budget);

  EncoderLawReport report;
  report.marginal_ok = true;
  report.pairwise_ok = true;
  report.max_defect = Rational(0);
  const Alphabet v_alpha = quantizer.v_alphabet();
  const Alphabet x_alpha = quantizer.x_alphabet();

  std::vector<Seq> vs, xs;
  for (std::uint64_t i = 0; i < law.v_count(); ++i) {
    vs.push_back(Seq::from_index(v_alpha, quantizer.n(), i));
  }
  for (std::uint64_t i = 0; i < law.x_count(); ++i) {
    xs.push_back(Seq::from_index(x_alpha, quantizer.m(), i));
  }

  for (std::uint64_t vi = 0; vi < law.v_count(); ++vi) {
    for (std::uint64_t xi = 0; xi < law.x_count(); ++xi) {
      const Rational defect =
          (law.marginal(vi, xi) - quantizer.realized_prob(xs[xi], vs[vi])).abs();
      if (!defect.is_zero()) report.marginal_ok = false;
      if (defect > report.max_defect) report.max_defect = defect;
    }
  }
  for (std::uint64_t vi = 0; vi < law.v_count(); ++vi) {
    for (std::uint64_t vh = 0; vh < law.v_count(); ++vh) {
      if (vi == vh) continue;
      for (std::uint64_t xi = 0; xi < law.x_count(); ++xi) {
        const Rational p1 = quantizer.realized_prob(xs[xi], vs[vi]);
        for (std::uint64_t xh = 0; xh < law.x_count(); ++xh) {
          const Rational p2 = quantizer.realized_prob(xs[xh], vs[vh]);
          Rational expected(0);
          if (!p1.is_zero() && !p2.is_zero()) {
            expected = beta(alpha, quantizer, vs[vi], vs[vh], xs[xi], xs[xh], budget) * p1 * p2;
          }
          const Rational defect = (law.joint(vi, xi, vh, xh) - expected).abs();
          if (!defect.is_zero()) report.pairwise_ok = false;
          if (defect > report.max_defect) report.max_defect = defect;
        }
      }
    }
  }
  return report;
}

PuncturedEncoder build_punctured_encoder(const LinearCode& code,
                                         const std::vector<Rational>& per_symbol_target,
                                         Alphabet x_alphabet, std::uint32_t m, Rng& rng,
                                         const Rational& tolerance) {
  if (per_symbol_target.size() != x_alphabet.q()) {
    throw DimensionError("build_punctured_encoder: target size != qX");
  }
  validate_distribution(per_symbol_target, "punctured target");
  const std::uint32_t l = code.output_length();
  const Alphabet u_alpha = code.alphabet();
  if (m < 1 || m > l) throw ConfigError("build_punctured_encoder: need 1 <= m <= l");

  // Smallest block size realizing the target within tolerance.
  for (std::uint32_t l0 = 1; static_cast<std::uint64_t>(l0) * m <= l; ++l0) {
    const BigInt slots = BigInt::pow(BigInt(u_alpha.q()), l0);
    std::vector<Rational> dist = per_symbol_target;
    const std::vector<BigInt> counts = largest_remainder(dist, slots);
    Rational tv(0);
    bool starved = false;
    std::vector<std::uint64_t> counts64;
    for (std::size_t i = 0; i < counts.size(); ++i) {
      counts64.push_back(counts[i].to_uint64());
      tv += (Rational(counts[i], slots) - dist[i]).abs();
      if (counts[i].is_zero() && dist[i].sign() > 0) starved = true;
    }
    tv = tv / Rational(2);
    if (starved || tv > tolerance) continue;
    Quantizer quantizer = Quantizer::blockwise_marginal(
        Alphabet(code.alphabet().q()), code.input_length(), u_alpha, l, x_alphabet, m, l0,
        counts64);
    PuncturingScheme scheme{l0, counts64, m, tv};
    return PuncturedEncoder{JsccEncoder::draw(code, std::move(quantizer), rng),
                            std::move(scheme)};
  }
  throw ConfigError("build_punctured_encoder: no block size within l/m realizes the target");
}

}  // namespace codespec
