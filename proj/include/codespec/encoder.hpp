#ifndef CODESPEC_ENCODER_HPP
#define CODESPEC_ENCODER_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "codespec/codes.hpp"

namespace codespec {

// Target conditional pmf P_{X^m|V^n}, exact rationals. The per-symbol
// forms are the primary ones; the full table is for desk-scale checks.
class ConditionalPmf {
 public:
  enum class Kind { kPerSymbolMarginal, kPerSymbolConditional, kFullTable };

  // P(x | v) = prod_j P_X(x_j): independent of v, any m.
  static ConditionalPmf per_symbol_marginal(Alphabet v_alphabet, std::uint32_t n,
                                            Alphabet x_alphabet, std::uint32_t m,
                                            std::vector<Rational> px);
  // P(x | v) = prod_j P_{X|V}(x_j | v_j): requires m == n.
  static ConditionalPmf per_symbol_conditional(Alphabet v_alphabet, Alphabet x_alphabet,
                                               std::uint32_t n,
                                               std::vector<std::vector<Rational>> px_given_v);
  // table[v_index][x_index], both lexicographic ranks.
  static ConditionalPmf full_table(Alphabet v_alphabet, std::uint32_t n, Alphabet x_alphabet,
                                   std::uint32_t m, std::vector<std::vector<Rational>> table);

  Kind kind() const { return kind_; }
  bool factorized() const { return kind_ != Kind::kFullTable; }
  const Alphabet& v_alphabet() const { return v_alphabet_; }
  const Alphabet& x_alphabet() const { return x_alphabet_; }
  std::uint32_t n() const { return n_; }
  std::uint32_t m() const { return m_; }
  std::optional<std::uint32_t> suggested_l() const { return suggested_l_; }
  void set_suggested_l(std::uint32_t l) { suggested_l_ = l; }

  Rational prob(const Seq& x, const Seq& v) const;
  // Per-letter conditional (factorized kinds).
  Rational letter_prob(Symbol x, Symbol v) const;
  const std::vector<Rational>& marginal_row() const;                  // kPerSymbolMarginal
  const std::vector<Rational>& conditional_row(Symbol v) const;       // kPerSymbolConditional
  const std::vector<Rational>& table_row(std::uint64_t v_index) const;  // kFullTable

  // Header "qV n qX m [l]"; then either rows "x num den" (per-symbol
  // marginal) or rows "v_seq x_seq num den" (full table, q <= 10).
  std::string to_text() const;
  static ConditionalPmf parse_text(std::string_view text);
  static ConditionalPmf load_file(const std::string& path);

 private:
  ConditionalPmf(Kind kind, Alphabet v_alphabet, std::uint32_t n, Alphabet x_alphabet,
                 std::uint32_t m)
      : kind_(kind), v_alphabet_(v_alphabet), x_alphabet_(x_alphabet), n_(n), m_(m) {}

  Kind kind_;
  Alphabet v_alphabet_;
  Alphabet x_alphabet_;
  std::uint32_t n_;
  std::uint32_t m_;
  std::vector<std::vector<Rational>> rows_;  // marginal: 1 row; conditional: qV rows; table: q^n rows
  std::optional<std::uint32_t> suggested_l_;
};

// q_n: V^n x U^l -> X^m given by slot partitions of U^l. Blockwise kinds
// read m blocks of l0 coded symbols from the front and discard the tail;
// the full table assigns each u in U^l individually per source word.
class Quantizer {
 public:
  enum class Kind { kBlockwiseMarginal, kBlockwiseConditional, kFullTable };

  static Quantizer blockwise_marginal(Alphabet v_alphabet, std::uint32_t n, Alphabet u_alphabet,
                                      std::uint32_t l, Alphabet x_alphabet, std::uint32_t m,
                                      std::uint32_t l0, std::vector<std::uint64_t> slot_counts);
  static Quantizer blockwise_conditional(Alphabet v_alphabet, Alphabet u_alphabet, std::uint32_t l,
                                         Alphabet x_alphabet, std::uint32_t n, std::uint32_t l0,
                                         std::vector<std::vector<std::uint64_t>> slot_counts);
  static Quantizer full_table(Alphabet v_alphabet, std::uint32_t n, Alphabet u_alphabet,
                              std::uint32_t l, Alphabet x_alphabet, std::uint32_t m,
                              std::vector<std::vector<std::uint32_t>> assignment);

  Kind kind() const { return kind_; }
  bool per_symbol() const { return kind_ != Kind::kFullTable; }
  const Alphabet& v_alphabet() const { return v_alphabet_; }
  const Alphabet& u_alphabet() const { return u_alphabet_; }
  const Alphabet& x_alphabet() const { return x_alphabet_; }
  std::uint32_t n() const { return n_; }
  std::uint32_t l() const { return l_; }
  std::uint32_t m() const { return m_; }
  std::uint32_t block_size() const { return l0_; }

  Seq evaluate(const Seq& v, const Seq& u) const;
  // Blockwise kinds: output symbol for one U^{l0} block rank (v_sym is
  // ignored by the marginal kind).
  Symbol evaluate_block(Symbol v_sym, std::uint64_t block_rank) const;
  BigInt slot_count(const Seq& v, const Seq& x) const;  // |q^{-1}(v, x)|
  Rational realized_prob(const Seq& x, const Seq& v) const;  // slot_count / |U|^l
  Rational per_symbol_prob(Symbol x, Symbol v) const;        // blockwise kinds
  std::vector<Seq> preimage(const Seq& v, const Seq& x,
                            std::uint64_t budget = kDefaultBudget) const;

 private:
  Quantizer(Kind kind, Alphabet v_alphabet, std::uint32_t n, Alphabet u_alphabet, std::uint32_t l,
            Alphabet x_alphabet, std::uint32_t m)
      : kind_(kind), v_alphabet_(v_alphabet), u_alphabet_(u_alphabet), x_alphabet_(x_alphabet),
        n_(n), l_(l), m_(m) {}

  Kind kind_;
  Alphabet v_alphabet_;
  Alphabet u_alphabet_;
  Alphabet x_alphabet_;
  std::uint32_t n_;
  std::uint32_t l_;
  std::uint32_t m_;
  std::uint32_t l0_ = 0;
  // blockwise: counts_[v][x] slots per U^{l0} block (marginal stores one row);
  // block_map_[v][u_block] -> x symbol.
  std::vector<std::vector<std::uint64_t>> counts_;
  std::vector<std::vector<Symbol>> block_map_;
  // full table: assignment_[v_index][u_index] -> x_index, table_counts_[v_index][x_index].
  std::vector<std::vector<std::uint32_t>> assignment_;
  std::vector<std::vector<std::uint64_t>> table_counts_;
};

// Largest-remainder apportionment of `slots` among dist (ties broken by
// smaller index). Returns integer shares summing to slots.
std::vector<BigInt> largest_remainder(const std::vector<Rational>& dist, const BigInt& slots);

struct QuantizerCellError {
  std::string v_label;  // empty for v-independent cells
  std::string x_label;
  Rational realized;
  Rational target;
  Rational abs_error;
};

struct QuantizerBuild {
  Quantizer quantizer;
  Rational max_tv;  // max over v of (1/2) sum_x |realized - target|
  bool starved = false;  // some x with target > 0 received zero slots
  std::vector<QuantizerCellError> cells;
};

// Realizes the target pmf with q_U^l slots per source word (blockwise
// kinds use q_U^{l0} slots per symbol with l0 = floor(l / m)); slots are
// assigned in lexicographic order by largest-remainder apportionment, so
// the result is bit-reproducible. TV error is exactly 0 for q_U-adic
// targets; starvation is reported, not fatal.
QuantizerBuild build_quantizer(const ConditionalPmf& target, Alphabet u_alphabet, std::uint32_t l,
                               std::uint64_t budget = kDefaultBudget);

// Phi(v) = q_n(v, F̂(v)): one frozen randomization per encoder instance.
class JsccEncoder {
 public:
  JsccEncoder(Quantizer quantizer, RandomizedAffineCode randomization);
  static JsccEncoder draw(const LinearCode& code, Quantizer quantizer, Rng& rng);

  const Quantizer& quantizer() const { return quantizer_; }
  const RandomizedAffineCode& randomization() const { return randomization_; }
  std::uint32_t n() const { return quantizer_.n(); }
  std::uint32_t m() const { return quantizer_.m(); }

  Seq encode(const Seq& v) const {
    return quantizer_.evaluate(v, randomization_.evaluate(v));
  }

 private:
  Quantizer quantizer_;
  RandomizedAffineCode randomization_;
};

// beta(F, q)(v, v̂, x, x̂): preimage-averaged alpha, exact when alpha is.
Rational beta(const AlphaTable& alpha, const Quantizer& quantizer, const Seq& v, const Seq& v_hat,
              const Seq& x, const Seq& x_hat, std::uint64_t budget = kDefaultBudget);

// beta'(F, q)(v̂, x̂) = max over P != 0 and u in U^l of the preimage-
// averaged alpha; dominates beta pointwise.
Rational beta_prime(const AlphaTable& alpha, const Quantizer& quantizer, const Seq& v_hat,
                    const Seq& x_hat, std::uint64_t budget = kDefaultBudget);

struct RhoReport {
  double rho = 0.0;  // (1/n) ln max beta'
  Rational max_beta_prime;
  std::uint64_t arg_v_index = 0;
  std::uint64_t arg_x_index = 0;
};

// rho(Phi_{F,q}) = (1/n) ln max_{v̂, x̂} beta'(v̂, x̂); 0 certifies a good
// encoder at this blocklength.
RhoReport rho_encoder(const AlphaTable& alpha, const Quantizer& quantizer,
                      std::uint64_t budget = kDefaultBudget);

// Exact pairwise law Pr{Phi(v)=x, Phi(v')=x'} of a random encoder,
// tabulated by exhaustive enumeration. Two constructions: the linear-
// code encoder (members x interleavers x offsets) and the independent-
// per-source-word random codebook it is measured against.
class EncoderLawTable {
 public:
  static EncoderLawTable from_linear_ensemble(const CodeEnsemble& ensemble,
                                              const Quantizer& quantizer,
                                              std::uint64_t budget = kDefaultBudget);
  static EncoderLawTable from_product_pmf(const ConditionalPmf& pmf,
                                          std::uint64_t budget = kDefaultBudget);

  std::uint64_t v_count() const { return v_count_; }
  std::uint64_t x_count() const { return x_count_; }
  std::uint32_t n() const { return n_; }
  Rational marginal(std::uint64_t v_index, std::uint64_t x_index) const;
  Rational joint(std::uint64_t v_index, std::uint64_t x_index, std::uint64_t v_hat_index,
                 std::uint64_t x_hat_index) const;

 private:
  EncoderLawTable() = default;
  std::uint32_t n_ = 0;
  std::uint64_t v_count_ = 0;
  std::uint64_t x_count_ = 0;
  std::vector<Rational> singles_;
  std::vector<Rational> pairs_;
};

// Brute-force maximum of (1/n) ln [Pr{Phi(v̂)=x̂ | Phi(v)=x} / Pr{Phi(v̂)=x̂}]
// over all admissible tuples; for a subset of `subset_size` independent
// identical encoders the value adds up.
double rho_max_single(const EncoderLawTable& law);
double rho_max(const EncoderLawTable& law, std::uint32_t subset_size);

struct EncoderLawReport {
  bool marginal_ok = false;  // Pr{Phi(v)=x} == realized quantizer pmf
  bool pairwise_ok = false;  // Pr{Phi(v)=x, Phi(v̂)=x̂} == beta * pmf * pmf
  Rational max_defect;
};

// Exhaustive check of both encoder-law identities for a linear-code encoder.
EncoderLawReport verify_encoder_law(const CodeEnsemble& ensemble, const Quantizer& quantizer,
                                    std::uint64_t budget = kDefaultBudget);

struct PuncturingScheme {
  std::uint32_t l0 = 0;                     // block size
  std::vector<std::uint64_t> slot_counts;   // per X symbol over U^{l0}
  std::uint32_t m = 0;                      // output length
  Rational tv;                              // realized-vs-target TV error
};

struct PuncturedEncoder {
  JsccEncoder encoder;
  PuncturingScheme scheme;
};

// Generalized puncturing: the smallest block size l0 whose q_U^{l0} slots
// apportion the per-symbol target within `tolerance` (and starve no
// positive-mass symbol) defines a blockwise symbol map over the first
// m*l0 coded symbols of F̂(v); the tail is discarded.
PuncturedEncoder build_punctured_encoder(const LinearCode& code,
                                         const std::vector<Rational>& per_symbol_target,
                                         Alphabet x_alphabet, std::uint32_t m, Rng& rng,
                                         const Rational& tolerance = Rational(0));

}  // namespace codespec

#endif
