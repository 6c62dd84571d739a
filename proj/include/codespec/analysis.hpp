#ifndef CODESPEC_ANALYSIS_HPP
#define CODESPEC_ANALYSIS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "codespec/codes.hpp"

namespace codespec {

// Shannon entropy of a type in nats; 0 ln 0 = 0.
double entropy(const TypeVector& p);
// Natural-log binary entropy h(x).
double binary_entropy(double x);

// |B(f, hX, hY)| = #{(x, f(x)) : x != 0, H(P_x) <= hX, H(P_{f(x)}) <= hY}.
std::uint64_t b_set_size(const LinearCode& code, double h_x, double h_y,
                         std::uint64_t budget = kDefaultBudget);

// E|B| over an ensemble, exact: column law for iid-entry kinds, weighted
// enumeration otherwise.
Rational expected_b_size(const CodeEnsemble& ensemble, double h_x, double h_y,
                         std::uint64_t budget = kDefaultBudget);

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
};

McEstimate b_size_mc(const CodeEnsemble& ensemble, double h_x, double h_y, std::uint64_t samples,
                     Rng& rng, std::uint64_t budget = kDefaultBudget);

struct DistanceRow {
  std::uint32_t n = 0;
  std::uint32_t m = 0;
  double expected_b = 0.0;   // E|B|
  bool exact = true;
  double std_error = 0.0;    // MC rows
  double proof_bound = 0.0;  // (n+1)^|X| (m+1)^|Y| exp{n delta + n hX + m hY - m ln q}
};

struct DistanceReport {
  bool condition_met = false;  // (hX + delta) R + hY < ln q
  double h_x = 0.0;
  double h_y = 0.0;
  double delta = 0.0;
  std::vector<DistanceRow> rows;
  bool non_increasing = false;  // within 3 sigma for MC rows
  bool within_bound = false;
};

// Distance-property trend for RLC(q, n, rate_den/rate_num * n): E|B| at each n,
// compared against the proof's finite-n exponential bound. Rows are exact
// (column law) up to `exact_limit` and Monte Carlo beyond.
DistanceReport distance_check(Alphabet alphabet, std::uint32_t l_multiplier,
                              const std::vector<std::uint32_t>& n_list, double h_x, double h_y,
                              double delta, std::uint32_t exact_limit, std::uint64_t mc_samples,
                              Rng& rng, std::uint64_t budget = kDefaultBudget);

struct EntropyProfile {
  double min_combined = 0.0;    // min_{x != 0} [H(P_x) R + H(P_{f(x)})]
  std::uint64_t argmin_index = 0;
  double min_output_entropy = 0.0;  // min_{x != 0} H(P_{f(x)})
  double max_zero_fraction = 0.0;   // max_{x != 0} P_{f(x)}(0)
  double normalized_distance = 0.0;  // Delta = 1 - max zero fraction
};

EntropyProfile min_entropy_profile(const LinearCode& code, std::uint64_t budget = kDefaultBudget);

enum class GvVerdict { kPass, kFail, kDegenerate };

struct GvSample {
  double distance = 0.0;  // Delta
  double lhs = 0.0;       // h(Delta) + Delta ln(q-1)
  double rhs = 0.0;       // (1 - R) ln q - slack
  GvVerdict verdict = GvVerdict::kPass;
};

struct GvReport {
  std::vector<GvSample> samples;
  double pass_fraction = 0.0;  // over non-degenerate samples
  std::uint64_t degenerate = 0;
};

// Gilbert-Varshamov check over sampled RLC(q, n, m) codes; exhaustive
// minimum distance per sample. Degenerate verdicts: rate >= 1 makes the
// right side vacuous, Delta = 1 sits on the entropy boundary.
GvReport gv_check(Alphabet alphabet, std::uint32_t n, std::uint32_t m, std::uint64_t samples,
                  double slack, Rng& rng, std::uint64_t budget = kDefaultBudget);
GvSample gv_single(const LinearCode& code, double slack, std::uint64_t budget = kDefaultBudget);

struct DensityReport {
  double density = 0.0;    // fraction of nonzero entries
  double threshold = 0.0;  // 1 - 1/q
  bool sparse = false;     // density < threshold
};

DensityReport matrix_density(const Matrix& a);

struct SparseRow {
  std::uint32_t n = 0;
  double delta_exact = 0.0;      // column-law exact (1/n) ln max alpha
  double delta_mc = 0.0;         // MC estimate at the exact argmax cell
  double delta_mc_lower = 0.0;   // 3-sigma lower confidence bound
  bool mc_used = false;
  double unit_row_output_entropy = 0.0;  // E[H(P_{F(e_k)})]
};

struct SparseReport {
  double density = 0.0;
  std::vector<SparseRow> rows;
  bool floor_met = false;          // every row's lower bound >= floor
  bool no_significant_drop = false;  // pairwise at 3 sigma
};

// Sparse-generator obstruction check: Bernoulli(density) ensembles at each
// n (m = n) keep the per-n goodness delta bounded away from 0.
SparseReport sparse_non_goodness_check(Alphabet alphabet, const Rational& density,
                                       const std::vector<std::uint32_t>& n_list, double floor_value,
                                       std::uint32_t exact_limit, std::uint64_t mc_samples,
                                       Rng& rng, std::uint64_t budget = kDefaultBudget);

struct SystematicReport {
  bool systematic = false;      // positions actually embed the input
  bool boundary = false;        // R <= 1/q + tolerance: no claim
  double rate = 0.0;
  double delta_n = 0.0;         // goodness at the all-a input slice
  bool rate_bound_consistent = false;  // R > 1/q forces delta_n > 0
};

// Systematic codes: a rate above 1/|X| forces a positive per-n goodness
// delta, exhibited at the repeated-symbol inputs a^n.
SystematicReport systematic_rate_check(const LinearCode& code,
                                       const std::vector<std::uint32_t>& positions,
                                       double tolerance, std::uint64_t budget = kDefaultBudget);

}  // namespace codespec

#endif
