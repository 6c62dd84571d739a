#ifndef CODESPEC_SPECTRA_HPP
#define CODESPEC_SPECTRA_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "codespec/algebra.hpp"
#include "codespec/rational.hpp"

namespace codespec {

// Exact empirical distribution of a sequence, kept as integer counts so
// no denominators are needed for keys.
class TypeVector {
 public:
  TypeVector(Alphabet alphabet, std::uint32_t n, std::vector<std::uint32_t> counts);
  static TypeVector zero_type(Alphabet alphabet, std::uint32_t n);

  const Alphabet& alphabet() const { return alphabet_; }
  std::uint32_t n() const { return n_; }
  const std::vector<std::uint32_t>& counts() const { return counts_; }
  bool is_zero_type() const { return counts_[0] == n_; }

  friend bool operator==(const TypeVector& a, const TypeVector& b) {
    return a.alphabet_ == b.alphabet_ && a.n_ == b.n_ && a.counts_ == b.counts_;
  }
  friend bool operator<(const TypeVector& a, const TypeVector& b) {
    return a.counts_ < b.counts_;
  }
  std::string to_string() const;  // "(c0,c1,...)"

 private:
  Alphabet alphabet_;
  std::uint32_t n_;
  std::vector<std::uint32_t> counts_;
};

using TypeKey = std::vector<std::uint32_t>;
using JointKey = std::pair<TypeKey, TypeKey>;

TypeVector type_of(const Seq& x);

// |T_P| = n! / prod_a counts[a]!
BigInt type_class_size(const TypeVector& p);

// All types of P_n(X) in lexicographic count order.
std::vector<TypeVector> all_types(Alphabet alphabet, std::uint32_t n);

// Probability mass over types; sparse, keys sorted lexicographically so
// iteration (and any serialization) is deterministic.
class Spectrum {
 public:
  Spectrum(Alphabet alphabet, std::uint32_t n) : alphabet_(alphabet), n_(n) {}

  const Alphabet& alphabet() const { return alphabet_; }
  std::uint32_t n() const { return n_; }

  void add(const TypeVector& type, const Rational& mass);
  Rational at(const TypeVector& type) const;  // 0 when absent
  const std::map<TypeKey, Rational>& cells() const { return cells_; }
  Rational total() const;

  friend bool operator==(const Spectrum& a, const Spectrum& b) {
    return a.n_ == b.n_ && a.alphabet_ == b.alphabet_ && a.cells_ == b.cells_;
  }

  std::string to_csv() const;  // counts..., num, den

 private:
  Alphabet alphabet_;
  std::uint32_t n_;
  std::map<TypeKey, Rational> cells_;
};

// Probability mass over (input type, output type) pairs.
class JointSpectrum {
 public:
  JointSpectrum(Alphabet in_alphabet, std::uint32_t n, Alphabet out_alphabet, std::uint32_t m)
      : in_alphabet_(in_alphabet), out_alphabet_(out_alphabet), n_(n), m_(m) {}

  const Alphabet& in_alphabet() const { return in_alphabet_; }
  const Alphabet& out_alphabet() const { return out_alphabet_; }
  std::uint32_t n() const { return n_; }
  std::uint32_t m() const { return m_; }

  void add(const TypeVector& p, const TypeVector& q, const Rational& mass);
  Rational at(const TypeVector& p, const TypeVector& q) const;
  const std::map<JointKey, Rational>& cells() const { return cells_; }
  Rational total() const;

  Spectrum marginal_in() const;
  Spectrum marginal_out() const;

  friend bool operator==(const JointSpectrum& a, const JointSpectrum& b) {
    return a.n_ == b.n_ && a.m_ == b.m_ && a.in_alphabet_ == b.in_alphabet_ &&
           a.out_alphabet_ == b.out_alphabet_ && a.cells_ == b.cells_;
  }

  std::string to_csv() const;  // p-counts..., q-counts..., num, den

 private:
  Alphabet in_alphabet_;
  Alphabet out_alphabet_;
  std::uint32_t n_;
  std::uint32_t m_;
  std::map<JointKey, Rational> cells_;
};

// S_X(X^n): type P has mass C(n, nP) / q^n.
Spectrum ambient_spectrum(std::uint32_t n, Alphabet alphabet);
// Ambient product spectrum over X^n x Y^m.
JointSpectrum ambient_joint_spectrum(std::uint32_t n, Alphabet in_alphabet, std::uint32_t m,
                                     Alphabet out_alphabet);

// Empirical type distribution of a nonempty collection of sequences.
Spectrum set_spectrum(const std::vector<Seq>& a);

// Joint spectrum of a nonempty relation {(x_i, y_i)}.
JointSpectrum relation_joint_spectrum(const std::vector<std::pair<Seq, Seq>>& pairs);

// Joint spectrum of rl(f) for f given pointwise on all of X^n.
JointSpectrum function_joint_spectrum(const std::vector<std::pair<Seq, Seq>>& graph);

enum class ConditionalDirection { kForwardGivenIn, kBackwardGivenOut };

// S_{Y|X}(Q|P) = S_XY(P,Q) / S_X(P) (or the mirrored version); throws
// DomainError when the conditioning type has zero marginal.
std::map<TypeKey, Rational> conditional_spectrum(const JointSpectrum& joint,
                                                 ConditionalDirection direction,
                                                 const TypeVector& given);

// Product spectrum over k components: keys are the concatenated per-
// component count vectors.
using ProductKey = std::vector<TypeKey>;
std::map<ProductKey, Rational> product_spectrum(const std::vector<Spectrum>& components);
// Exhaustive joint spectrum of a product set (oracle-side companion to
// product_spectrum).
std::map<ProductKey, Rational> product_set_spectrum(const std::vector<std::vector<Seq>>& sets,
                                                    std::uint64_t budget = kDefaultBudget);

// E[S_XY(F^RB)] = S_XY(X^n x Y^m), the closed form.
JointSpectrum random_binning_expected_spectrum(std::uint32_t n, Alphabet in_alphabet,
                                               std::uint32_t m, Alphabet out_alphabet);
// Companion verifier: enumerates all (q_Y^m)^(q_X^n) binning functions and
// checks exact equality with the closed form. Refuses above budget.
bool verify_random_binning(std::uint32_t n, Alphabet in_alphabet, std::uint32_t m,
                           Alphabet out_alphabet, std::uint64_t budget = kDefaultBudget);

// Joint spectrum of sigma_out ∘ f ∘ sigma_in equals that of f (checked
// exactly; f given as its graph).
bool check_perm_invariance(const std::vector<std::pair<Seq, Seq>>& graph, const Perm& sigma_in,
                           const Perm& sigma_out);

}  // namespace codespec

#endif
