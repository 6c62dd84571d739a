#ifndef CODESPEC_CODES_HPP
#define CODESPEC_CODES_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "codespec/rng.hpp"
#include "codespec/spectra.hpp"

namespace codespec {

// Linear code x -> x G over F_q, generator n x m.
class LinearCode {
 public:
  explicit LinearCode(Matrix generator);

  const Matrix& generator() const { return generator_; }
  const Alphabet& alphabet() const { return generator_.alphabet(); }
  std::uint32_t input_length() const { return generator_.rows(); }
  std::uint32_t output_length() const { return generator_.cols(); }
  Rational rate() const { return Rational(input_length(), output_length()); }

  Seq encode(const Seq& x) const { return mat_vec(x, generator_); }
  // All (x, f(x)) pairs in input-lexicographic order.
  std::vector<std::pair<Seq, Seq>> graph(std::uint64_t budget = kDefaultBudget) const;

 private:
  Matrix generator_;
};

Spectrum kernel_spectrum(const LinearCode& code, std::uint64_t budget = kDefaultBudget);
Spectrum image_spectrum(const LinearCode& code, std::uint64_t budget = kDefaultBudget);
JointSpectrum joint_spectrum_exact(const LinearCode& code, std::uint64_t budget = kDefaultBudget);

// Interleaved coset code F̂ = Sigma_m ∘ F ∘ Sigma_n + offset.
class RandomizedAffineCode {
 public:
  RandomizedAffineCode(LinearCode base, Perm outer, Perm inner, Seq offset);
  // Draws outer interleaver, inner interleaver, then offset, in that order.
  static RandomizedAffineCode draw(LinearCode base, Rng& rng);
  static RandomizedAffineCode trivial(LinearCode base);

  const LinearCode& base() const { return base_; }
  const Perm& outer() const { return outer_; }
  const Perm& inner() const { return inner_; }
  const Seq& offset() const { return offset_; }

  Seq evaluate(const Seq& x) const;

  // Matrix text, then outer image line, inner image line, offset line
  // (permutation images 1-based).
  std::string to_text() const;
  static RandomizedAffineCode parse_text(std::string_view text);

 private:
  LinearCode base_;
  Perm outer_;
  Perm inner_;
  Seq offset_;
};

// A distribution over linear codes F_q^n -> F_q^m. Deterministic codes
// and explicit weighted lists share one code path with the i.i.d.-entry
// families (uniform RLC and Bernoulli-masked sparse generators).
class CodeEnsemble {
 public:
  enum class Kind { kDeterministic, kExplicitList, kRandomLinear, kBernoulliSparse };

  static CodeEnsemble deterministic(LinearCode code);
  static CodeEnsemble explicit_list(std::vector<std::pair<LinearCode, Rational>> members);
  static CodeEnsemble random_linear(Alphabet alphabet, std::uint32_t n, std::uint32_t m);
  // Each entry is nonzero with probability `density`, uniform over the
  // q - 1 nonzero values.
  static CodeEnsemble bernoulli_sparse(Alphabet alphabet, std::uint32_t n, std::uint32_t m,
                                       Rational density);

  Kind kind() const { return kind_; }
  const Alphabet& alphabet() const { return alphabet_; }
  std::uint32_t input_length() const { return n_; }
  std::uint32_t output_length() const { return m_; }

  LinearCode sample(Rng& rng) const;
  bool iid_entries() const {
    return kind_ == Kind::kRandomLinear || kind_ == Kind::kBernoulliSparse;
  }
  // Law of a single generator entry (iid kinds only).
  std::vector<Rational> entry_law() const;
  // Number of members when finitely enumerable (saturating at 2^63).
  std::uint64_t enumeration_size() const;
  std::vector<std::pair<LinearCode, Rational>> enumerate(std::uint64_t budget = kDefaultBudget) const;

 private:
  Kind kind_;
  Alphabet alphabet_;
  std::uint32_t n_;
  std::uint32_t m_;
  std::vector<std::pair<LinearCode, Rational>> members_;  // explicit/deterministic
  Rational density_;                                      // bernoulli

  CodeEnsemble(Kind kind, Alphabet alphabet, std::uint32_t n, std::uint32_t m)
      : kind_(kind), alphabet_(alphabet), n_(n), m_(m) {}
};

enum class SpectrumMethod {
  kAuto,       // enumerate if within budget, else column law (iid kinds)
  kEnumerate,  // weighted average over every member
  kColumnLaw,  // exact via per-input-type output-symbol laws (iid kinds)
};

struct ExpectedSpectrum {
  JointSpectrum spectrum;
  bool exact = true;
  std::uint64_t samples = 0;     // > 0 when Monte Carlo
  bool input_sampled = false;    // MC sampled inputs as well as codes
};

// E[S_XY(F)] over the ensemble, exact.
ExpectedSpectrum expected_joint_spectrum(const CodeEnsemble& ensemble,
                                         SpectrumMethod method = SpectrumMethod::kAuto,
                                         std::uint64_t budget = kDefaultBudget);

// Per-input-type law of one output symbol for iid-entry ensembles:
// columns of the generator are iid, so x A has iid symbols with this law.
std::vector<Rational> column_symbol_law(const CodeEnsemble& ensemble, const TypeVector& p);

// Monte Carlo estimate of E[S_XY(F)]: sample codes, average their exact
// joint spectra; samples inputs too (flagged) when q^n exceeds the budget.
ExpectedSpectrum joint_spectrum_mc(const CodeEnsemble& ensemble, std::uint64_t samples, Rng& rng,
                                   std::uint64_t budget = kDefaultBudget);

// alpha(F)(P, Q) = E[S_XY(F)](P, Q) / S_XY(X^n x Y^m)(P, Q) on every type
// pair; kernel of the goodness criteria.
struct AlphaTable {
  Alphabet in_alphabet;
  Alphabet out_alphabet;
  std::uint32_t n = 0;
  std::uint32_t m = 0;
  std::map<JointKey, Rational> values;  // absent key => alpha 0
  bool exact = true;
  std::uint64_t samples = 0;

  Rational at(const TypeVector& p, const TypeVector& q) const;
  std::string to_csv() const;  // extra header line records exact/estimated
};

AlphaTable alpha_table(const CodeEnsemble& ensemble, SpectrumMethod method = SpectrumMethod::kAuto,
                       std::uint64_t budget = kDefaultBudget);
AlphaTable alpha_table_mc(const CodeEnsemble& ensemble, std::uint64_t samples, Rng& rng,
                          std::uint64_t budget = kDefaultBudget);
Rational alpha(const CodeEnsemble& ensemble, const TypeVector& p, const TypeVector& q,
               SpectrumMethod method = SpectrumMethod::kAuto,
               std::uint64_t budget = kDefaultBudget);

enum class GoodnessCriterion { kKernel, kImage, kJoint };

struct GoodnessReport {
  double delta = 0.0;     // (1/n) ln max ratio (1/m for the image criterion)
  bool vacuous = false;   // no nonzero-type mass at all (injective kernel)
  Rational max_ratio;     // the maximized spectrum ratio
  TypeKey arg_p;          // argmax input type (joint/kernel)
  TypeKey arg_q;          // argmax output type (joint/image)
  bool exact = true;
  std::uint64_t samples = 0;
};

// (1/n) ln max_{P != 0, Q} alpha(P, Q); 0 certifies a good code at this
// blocklength. Argmax ties resolve to the lexicographically smallest pair.
GoodnessReport goodness_delta(const CodeEnsemble& ensemble,
                              SpectrumMethod method = SpectrumMethod::kAuto,
                              std::uint64_t budget = kDefaultBudget);
GoodnessReport goodness_delta_mc(const CodeEnsemble& ensemble, std::uint64_t samples, Rng& rng,
                                 std::uint64_t budget = kDefaultBudget);

// goodness criteria: kernel (Slepian-Wolf), image (channel coding), joint
// (lossless JSCC).
GoodnessReport certify_goodness(const CodeEnsemble& ensemble, GoodnessCriterion criterion,
                                std::uint64_t budget = kDefaultBudget);

RandomizedAffineCode randomize(const LinearCode& code, Rng& rng);

struct PairwiseIndependenceReport {
  bool uniform_marginal_ok = false;    // Pr{F̂(x) = y} = q^{-m} for all x, y
  bool conditional_ok = false;         // conditional law matches q^{-m} alpha
  Rational max_defect;                 // largest absolute identity defect
  std::uint64_t randomizations = 0;    // enumerated (member, perms, offset) count
};

// Exhaustively enumerates interleavers x offsets (x members) and checks
// both pairwise-independence identities with exact arithmetic.
PairwiseIndependenceReport verify_pairwise_independence(const CodeEnsemble& ensemble,
                                                        std::uint64_t budget = kDefaultBudget);

struct CertifiedSample {
  LinearCode code;
  std::uint32_t tries = 0;
  Rational ratio;      // max_{P != 0, Q} S_XY(f)(P,Q) / ambient(P,Q)
  double threshold = 0.0;
};

// Draws sample codes until one has max spectrum ratio below
// (n+1)^c1 (m+1)^c2; throws SearchError with the best ratio found when
// max_tries is exhausted.
CertifiedSample sample_certified_code(const CodeEnsemble& ensemble, double c1, double c2, Rng& rng,
                                      std::uint32_t max_tries,
                                      std::uint64_t budget = kDefaultBudget);

}  // namespace codespec

#endif
