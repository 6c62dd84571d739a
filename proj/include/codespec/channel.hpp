#ifndef CODESPEC_CHANNEL_HPP
#define CODESPEC_CHANNEL_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "codespec/encoder.hpp"

namespace codespec {

// K correlated memoryless sources: one exact per-letter joint pmf over
// the product of the terminal alphabets, extended i.i.d. across letters.
// Tuple indices are mixed-radix with terminal 0 most significant.
class SourceModel {
 public:
  SourceModel(std::vector<Alphabet> alphabets, std::vector<Rational> joint_pmf);
  static SourceModel single(Alphabet alphabet, std::vector<Rational> pmf);
  // V1 ~ uniform, V2 = V1 + noise with flip probability `crossover`.
  static SourceModel doubly_symmetric_binary(const Rational& crossover);

  std::uint32_t terminals() const { return static_cast<std::uint32_t>(alphabets_.size()); }
  const std::vector<Alphabet>& alphabets() const { return alphabets_; }
  std::uint64_t joint_card() const { return joint_.size(); }
  const Rational& prob(std::uint64_t v_tuple) const { return joint_[v_tuple]; }
  std::uint64_t tuple_index(const std::vector<Symbol>& letters) const;

  // One i.i.d. letter; returns the joint tuple index.
  std::uint64_t sample_letter(Rng& rng) const;
  // K sequences of length n.
  std::vector<Seq> sample(std::size_t n, Rng& rng) const;

 private:
  std::vector<Alphabet> alphabets_;
  std::vector<Rational> joint_;
  std::vector<std::uint64_t> strides_;
  std::uint64_t sample_den_ = 0;
  std::vector<std::uint64_t> sample_cum_;
};

// Memoryless MAC: per-letter W(y | x_1..x_K) as exact rationals. Output
// symbols are plain integers in [0, y_card); no field structure assumed.
class MacModel {
 public:
  MacModel(std::vector<Alphabet> input_alphabets, std::uint32_t y_card,
           std::vector<Rational> transition);  // [x_tuple * y_card + y]
  static MacModel noiseless(Alphabet alphabet);                    // K=1, Y = X
  static MacModel bsc(const Rational& flip);                       // K=1 binary
  static MacModel binary_adder();                                  // K=2, Y = X1 + X2 over Z
  // K=2 channel that ignores terminal 2: W(y | x1, x2) = base(y | x1).
  static MacModel ignore_second_terminal(const MacModel& base_k1, Alphabet x2_alphabet);

  std::uint32_t terminals() const { return static_cast<std::uint32_t>(inputs_.size()); }
  const std::vector<Alphabet>& input_alphabets() const { return inputs_; }
  std::uint64_t x_card() const { return x_card_; }
  std::uint32_t y_card() const { return y_card_; }
  const Rational& prob(std::uint64_t x_tuple, std::uint32_t y) const {
    return w_[x_tuple * y_card_ + y];
  }
  std::uint64_t tuple_index(const std::vector<Symbol>& letters) const;

  std::uint32_t transmit_letter(std::uint64_t x_tuple, Rng& rng) const;
  std::vector<std::uint32_t> transmit(const std::vector<Seq>& inputs, Rng& rng) const;

 private:
  std::vector<Alphabet> inputs_;
  std::uint64_t x_card_ = 0;
  std::uint32_t y_card_ = 0;
  std::vector<Rational> w_;
  std::vector<std::uint64_t> strides_;
  std::vector<std::uint64_t> row_den_;
  std::vector<std::vector<std::uint64_t>> row_cum_;
};

// Per-letter conditional law P(x | v) of one terminal's encoder, exact.
struct LetterPmf {
  Alphabet v_alphabet;
  Alphabet x_alphabet;
  std::vector<std::vector<Rational>> p;  // p[v][x]

  static LetterPmf from_quantizer(const Quantizer& quantizer);
  static LetterPmf uniform(Alphabet v_alphabet, Alphabet x_alphabet);
  static LetterPmf from_conditional_pmf(const ConditionalPmf& pmf);
};

// The exact per-letter joint law p(v, x, y) of product-factorized systems
// together with the per-subset information-density statistics
//   g_A(v, x, y) = ln W(y|x) - ln P(y|x_{A^c} v_{A^c}) - ln 1/P(v_A|v_{A^c})
// so that (v^n, x^n, y^n) lies in T^A_{n,gamma} iff sum_t g_A > n(rho_A + gamma).
// Everything downstream (decoder, bounds, info quantities) reads these
// tables, so simulation and bound use identical arithmetic.
class SystemLaw {
 public:
  SystemLaw(const SourceModel& source, const std::vector<LetterPmf>& encoder_pmfs,
            const MacModel& mac);

  std::uint32_t terminals() const { return terminals_; }
  std::uint64_t v_card() const { return v_card_; }
  std::uint64_t x_card() const { return x_card_; }
  std::uint32_t y_card() const { return y_card_; }
  std::uint32_t subset_count() const { return (1u << terminals_) - 1; }

  const Rational& letter_prob(std::uint64_t vt, std::uint64_t xt, std::uint32_t y) const {
    return prob_[(vt * x_card_ + xt) * y_card_ + y];
  }
  // Subset stat for mask in [1, 2^K); index = (vt * x_card + xt) * y_card + y.
  double subset_stat(std::uint32_t mask, std::uint64_t vt, std::uint64_t xt,
                     std::uint32_t y) const {
    return stats_[mask - 1][(vt * x_card_ + xt) * y_card_ + y];
  }
  double map_stat(std::uint64_t vt, std::uint64_t xt, std::uint32_t y) const {
    return map_[(vt * x_card_ + xt) * y_card_ + y];
  }
  // Per-letter ln 1/P(v_A | v_{A^c}); a large positive sentinel marks a
  // zero conditional.
  double h_letter(std::uint32_t mask, std::uint64_t vt) const {
    return h_[mask - 1][vt];
  }
  const std::vector<Alphabet>& v_alphabets() const { return v_alphabets_; }
  const std::vector<Alphabet>& x_alphabets() const { return x_alphabets_; }
  std::uint64_t v_stride(std::uint32_t terminal) const { return v_strides_[terminal]; }
  std::uint64_t x_stride(std::uint32_t terminal) const { return x_strides_[terminal]; }

 private:
  std::uint32_t terminals_;
  std::uint64_t v_card_;
  std::uint64_t x_card_;
  std::uint32_t y_card_;
  std::vector<Alphabet> v_alphabets_;
  std::vector<Alphabet> x_alphabets_;
  std::vector<std::uint64_t> v_strides_;
  std::vector<std::uint64_t> x_strides_;
  std::vector<Rational> prob_;
  std::vector<std::vector<double>> stats_;
  std::vector<std::vector<double>> h_;
  std::vector<double> map_;
};

struct InfoDensity {
  double i = 0.0;      // (1/n) ln W^n / P(y | x_{A^c}, v_{A^c}), nats
  double h = 0.0;      // (1/n) ln 1 / P(v_A | v_{A^c}), nats
  bool i_defined = true;  // false when a zero probability was hit
  bool h_defined = true;
};

// Per-sequence information density i(x_A; y | x_{A^c}, v_{A^c}) and
// conditional entropy rate h(v_A | v_{A^c}) for one subset mask. Zero
// probabilities set the defined flags false (the decoder treats such
// tuples as not typical).
InfoDensity info_density(const SystemLaw& law, std::uint32_t mask, const std::vector<Seq>& v,
                         const std::vector<std::vector<Symbol>>& x,
                         const std::vector<std::uint32_t>& y);

enum class DecoderMode { kTypicality, kMap, kBoth };

struct DecoderSpec {
  double gamma = 0.1;                  // threshold in nats, > 0
  DecoderMode mode = DecoderMode::kTypicality;
  std::vector<double> rho_terms;       // per subset mask-1; empty means all 0
};

struct DecodeOutcome {
  std::vector<std::uint64_t> typ_decoded;  // per-terminal candidate index
  bool typ_ambiguous = false;              // zero or multiple typical candidates
  std::uint64_t typical_count = 0;
  std::vector<std::uint64_t> map_decoded;
};

// Reusable buffers so repeated decode calls stay allocation-free.
struct DecodeWorkspace {
  std::vector<double> folded;
  std::vector<std::uint32_t> part;
  std::vector<std::size_t> part_offset;
};

// Exhaustive joint decoder over all candidate source tuples. Candidate
// codewords come as one flat buffer per terminal: codewords[i] holds
// cand_count(i) * n output symbols, candidate-major, v in lex order.
class JointDecoder {
 public:
  JointDecoder(const SystemLaw& law, DecoderSpec spec, std::uint32_t n,
               std::uint64_t budget = kDefaultBudget);

  DecodeOutcome decode(const std::vector<std::uint32_t>& y,
                       const std::vector<const Symbol*>& codewords, DecodeWorkspace& ws) const;
  // Subset threshold passes of one candidate tuple (true-tuple diagnostics).
  std::vector<bool> subset_passes(const std::vector<std::uint32_t>& y,
                                  const std::vector<const Symbol*>& codewords,
                                  const std::vector<std::uint64_t>& tuple) const;

  const SystemLaw& law() const { return law_; }
  const DecoderSpec& spec() const { return spec_; }
  std::uint32_t n() const { return n_; }
  std::uint64_t candidate_count(std::uint32_t terminal) const {
    return candidate_counts_[terminal];
  }
  double threshold(std::uint32_t mask) const;  // n * (gamma + rho_A)

 private:
  const SystemLaw& law_;
  DecoderSpec spec_;
  std::uint32_t n_;
  std::vector<std::uint64_t> candidate_counts_;
};

struct DecodingErrorBound {
  double atypicality = 0.0;    // Pr{(V^n, X^n, Y^n) not in T_{n,gamma}}
  double union_penalty = 0.0;  // (2^K - 1) e^{-n gamma}
  double bound = 0.0;          // min(1, atypicality + union_penalty)
  bool exact = true;
  std::uint64_t samples = 0;
};

// Exact atypicality by enumerating joint letter types over the support of
// the per-letter law (the statistics are additive, so membership in
// T_{n,gamma} depends on the letter histogram only).
DecodingErrorBound decoding_error_bound(const SystemLaw& law, std::uint32_t n, double gamma,
                                        const std::vector<double>& rho_terms = {},
                                        std::uint64_t budget = kDefaultBudget);
DecodingErrorBound decoding_error_bound_mc(const SystemLaw& law, std::uint32_t n, double gamma,
                                           std::uint64_t samples, Rng& rng,
                                           const std::vector<double>& rho_terms = {});

struct SubsetQuantities {
  std::uint32_t mask = 0;
  double h_cond = 0.0;   // H(V_A | V_{A^c}) in nats
  double i_cond = 0.0;   // (1/N) I(X_A^N; Y^N | X_{A^c}^N, V_{A^c}^N)
  double rho_term = 0.0;
  double margin = 0.0;   // i_cond - h_cond - rho_term
};

struct InfoQuantities {
  std::uint32_t block = 1;  // N
  std::vector<SubsetQuantities> subsets;
  double min_margin = 0.0;
};

// All 2^K - 1 subset conditions of the memoryless achievability corollary,
// from exact probabilities (logs taken last).
InfoQuantities single_letter_quantities(const SourceModel& source,
                                        const std::vector<LetterPmf>& encoder_pmfs,
                                        const MacModel& mac, std::uint32_t block = 1,
                                        const std::vector<double>& rho_terms = {},
                                        std::uint64_t budget = kDefaultBudget);

struct GridSearchResult {
  std::vector<LetterPmf> best;
  InfoQuantities quantities;
};

// Brute-force search over per-terminal input pmfs on the rational grid
// {k/resolution}; maximizes the minimum subset margin.
GridSearchResult grid_search_pmf(const SourceModel& source, const MacModel& mac,
                                 std::uint32_t resolution, std::uint32_t block = 1,
                                 std::uint64_t budget = kDefaultBudget);

enum class RandomizationMode { kFreshPerTrial, kFrozen };
enum class BoundMode { kExact, kMonteCarlo, kNone };

struct SimConfig {
  SourceModel source;
  MacModel mac;
  std::optional<Matrix> code_matrix;   // fixed generator; else RLC per n
  std::uint32_t rlc_l_multiplier = 1;  // l = multiplier * n
  std::optional<ConditionalPmf> target;  // default: uniform per-symbol
  std::vector<std::uint32_t> n_list;
  std::uint32_t trials = 0;
  std::uint64_t seed = 0;
  double gamma_c = 0.5;                 // gamma_n = gamma_c / sqrt(n)
  std::optional<double> gamma_fixed;    // overrides the schedule
  DecoderMode mode = DecoderMode::kTypicality;
  RandomizationMode randomization = RandomizationMode::kFreshPerTrial;
  BoundMode bound_mode = BoundMode::kNone;
  double rho_term = 0.0;
  std::uint64_t bound_samples = 10000;
  std::uint64_t budget = kDefaultBudget;
  // Trials are split across threads with per-trial split rngs and merged
  // in index order, so results do not depend on the thread count.
  std::uint32_t threads = 1;

  double gamma_for(std::uint32_t n) const;

  static SimConfig parse_text(std::string_view text, const std::string& base_dir = ".");
  static SimConfig load_file(const std::string& path);
};

struct SimulationReport {
  std::uint32_t n = 0;
  std::uint32_t trials = 0;
  std::uint64_t typ_errors = 0;
  double eps_hat = 0.0;
  std::uint64_t map_errors = 0;
  std::vector<std::uint64_t> subset_fail_counts;  // true tuple outside T^A
  std::uint64_t ambiguous_count = 0;
  double bound = 0.0;  // NaN when not computed
  bool bound_exact = false;
  std::uint64_t seed = 0;
  double gamma = 0.0;
};

std::vector<SimulationReport> run_simulation(const SimConfig& config);

// CSV contract: n,trials,errors,eps_hat,bound,seed (mode both appends
// map_errors,map_eps).
std::string reports_to_csv(const std::vector<SimulationReport>& reports, DecoderMode mode);

// 12-significant-digit float formatting used by every report writer.
std::string format_g12(double value);

}  // namespace codespec

#endif
