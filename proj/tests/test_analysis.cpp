#include <doctest.h>

#include <cmath>

#include "codespec/analysis.hpp"

using namespace codespec;

namespace {
const Alphabet f2(2);
}

TEST_SUITE("analysis") {
  TEST_CASE("entropy of types") {
    CHECK(entropy(TypeVector(f2, 4, {4, 0})) == doctest::Approx(0.0));
    CHECK(entropy(TypeVector(f2, 4, {2, 2})) == doctest::Approx(std::log(2.0)));
    CHECK(entropy(TypeVector(f2, 4, {3, 1})) == doctest::Approx(0.5623351446).epsilon(1e-9));
    // Depends only on the multiset of counts.
    CHECK(entropy(TypeVector(f2, 4, {1, 3})) == entropy(TypeVector(f2, 4, {3, 1})));
    const Alphabet f3(3);
    CHECK(entropy(TypeVector(f3, 6, {1, 2, 3})) == entropy(TypeVector(f3, 6, {3, 1, 2})));
    CHECK(binary_entropy(0.5) == doctest::Approx(std::log(2.0)));
    CHECK(binary_entropy(0.0) == 0.0);
  }

  TEST_CASE("b_set_size examples") {
    const LinearCode id(Matrix::identity(f2, 2));
    // Vacuous thresholds count everything but the zero input.
    CHECK(b_set_size(id, std::log(2.0), std::log(2.0)) == 3);
    // hX < 0 admits nothing.
    CHECK(b_set_size(id, -0.1, std::log(2.0)) == 0);
    // hX = 0 leaves only x = 11 with H(P_x) = 0.
    CHECK(b_set_size(id, 0.0, std::log(2.0)) == 1);
    for (std::uint32_t n : {3u, 4u}) {
      const LinearCode idn(Matrix::identity(f2, n));
      CHECK(b_set_size(idn, std::log(2.0), std::log(2.0)) == (std::uint64_t{1} << n) - 1);
    }
  }

  TEST_CASE("expected_b_size: column law equals enumeration and MC agrees") {
    const CodeEnsemble rlc = CodeEnsemble::random_linear(f2, 3, 6);
    const double hx = 0.4, hy = 0.35;
    const Rational exact = expected_b_size(rlc, hx, hy);
    // Enumeration over all 2^18 members is over budget; compare against a
    // weighted mean over the enumerable (2,4) ensemble instead.
    const CodeEnsemble small = CodeEnsemble::random_linear(f2, 2, 4);
    Rational mean(0);
    for (const auto& [code, w] : small.enumerate()) {
      mean += w * Rational(BigInt::from_uint64(b_set_size(code, hx, hy)), BigInt(1));
    }
    CHECK(expected_b_size(small, hx, hy) == mean);
    // Monte Carlo within 3 sigma of the column-law value.
    Rng rng(13);
    const McEstimate mc = b_size_mc(rlc, hx, hy, 4000, rng);
    CHECK(std::abs(mc.mean - exact.to_double()) <= 3.0 * mc.std_error + 1e-9);
  }

  TEST_CASE("distance_check: guard and trend") {
    Rng rng(17);
    // Condition violated: no claim.
    const DistanceReport guard =
        distance_check(f2, 1, {4}, std::log(2.0), std::log(2.0), 0.0, 8, 100, rng);
    CHECK_FALSE(guard.condition_met);
    CHECK(guard.rows.empty());
    // Rate 1/2 with margin: E|B| decreasing and below the proof bound.
    const DistanceReport report = distance_check(f2, 2, {4, 6, 8}, 0.3, 0.3, 0.0, 8, 100, rng);
    CHECK(report.condition_met);
    CHECK(report.rows.size() == 3);
    for (const DistanceRow& row : report.rows) {
      CHECK(row.exact);
      CHECK(row.expected_b <= row.proof_bound);
    }
    CHECK(report.non_increasing);
    CHECK(report.within_bound);
  }

  TEST_CASE("min_entropy_profile") {
    // Identity code: the all-ones input has both entropies 0.
    const LinearCode id(Matrix::identity(f2, 3));
    const EntropyProfile prof = min_entropy_profile(id);
    CHECK(prof.min_combined == doctest::Approx(0.0));
    CHECK(prof.min_output_entropy == doctest::Approx(0.0));
    CHECK(prof.argmin_index == 7);  // x = 111
    CHECK(prof.normalized_distance == doctest::Approx(1.0 / 3.0));
    // Repetition code 1 -> 4: single nonzero input, output type pure.
    const LinearCode rep(Matrix::parse_text("2 1 4\n1 1 1 1\n"));
    const EntropyProfile rprof = min_entropy_profile(rep);
    CHECK(rprof.min_combined == doctest::Approx(0.0));
    CHECK(rprof.normalized_distance == doctest::Approx(1.0));
    CHECK_THROWS_AS(min_entropy_profile(id, 2), BudgetError);
  }

  TEST_CASE("gv_check verdicts") {
    // Repetition code: Delta = 1 is the boundary entropy case.
    CHECK(gv_single(LinearCode(Matrix::parse_text("2 1 4\n1 1 1 1\n")), 0.15).verdict ==
          GvVerdict::kDegenerate);
    // Identity (rate 1): the right side is vacuous.
    CHECK(gv_single(LinearCode(Matrix::identity(f2, 4)), 0.01).verdict == GvVerdict::kDegenerate);
    // A zero row forces distance 0 at rate 1/2: genuine failure.
    const GvSample zero = gv_single(LinearCode(Matrix::parse_text("2 2 4\n0 0 0 0\n1 1 1 1\n")),
                                    0.15);
    CHECK(zero.distance == doctest::Approx(0.0));
    CHECK(zero.verdict == GvVerdict::kFail);
    // RLC(2, 8, 16): at least 90% of samples satisfy GV with slack 0.15.
    Rng rng(19);
    const GvReport report = gv_check(f2, 8, 16, 40, 0.15, rng);
    CHECK(report.pass_fraction >= 0.9);
    // Distance agrees with the profile scan on every sample (cross-check).
    Rng rng2(19);
    for (std::uint64_t s = 0; s < 5; ++s) {
      Rng child = rng2.split(s);
      const LinearCode code(random_matrix(8, 16, f2, child));
      CHECK(gv_single(code, 0.15).distance ==
            doctest::Approx(min_entropy_profile(code).normalized_distance));
    }
  }

  TEST_CASE("matrix density") {
    CHECK(matrix_density(Matrix::identity(f2, 2)).density == doctest::Approx(0.5));
    CHECK(matrix_density(Matrix::zeros(f2, 3, 3)).density == doctest::Approx(0.0));
    const DensityReport dense = matrix_density(Matrix::parse_text("2 1 2\n1 1\n"));
    CHECK(dense.threshold == doctest::Approx(0.5));
    CHECK_FALSE(dense.sparse);
    CHECK(matrix_density(Matrix::identity(f2, 4)).sparse);
  }

  TEST_CASE("sparse ensembles stay bad, RLC stays good") {
    Rng rng(23);
    const SparseReport report =
        sparse_non_goodness_check(f2, Rational(1, 4), {4, 6}, 0.05, 6, 500, rng);
    CHECK(report.rows.size() == 2);
    for (const SparseRow& row : report.rows) {
      CHECK(row.delta_exact >= 0.05);
      CHECK_FALSE(row.mc_used);  // exact_limit covers both
      CHECK(row.unit_row_output_entropy < std::log(2.0) - 0.05);
    }
    CHECK(report.floor_met);
    CHECK(report.no_significant_drop);
    // delta of the Bernoulli(1/4) square ensemble is (ln 3/2) exactly at
    // the unit-input/zero-output cell: alpha = (2(1-d))^n ... = 1.5^m.
    CHECK(report.rows[0].delta_exact == doctest::Approx(std::log(1.5)));
    // Control group: uniform RLC has delta exactly 0.
    for (std::uint32_t n : {4u, 6u}) {
      CHECK(goodness_delta(CodeEnsemble::random_linear(f2, n, n), SpectrumMethod::kColumnLaw)
                .delta == 0.0);
    }
  }

  TEST_CASE("systematic rate check") {
    // Rate 1/2 binary systematic code: boundary, no claim.
    const LinearCode half(Matrix::parse_text("2 1 2\n1 1\n"));
    CHECK(systematic_rate_check(half, {0}, 0.01).boundary);
    // Rate 2/3 systematic: delta positive, corollary consistent.
    const LinearCode sys(Matrix::parse_text("2 2 3\n1 0 1\n0 1 1\n"));
    const SystematicReport rep = systematic_rate_check(sys, {0, 1}, 0.01);
    CHECK(rep.systematic);
    CHECK_FALSE(rep.boundary);
    CHECK(rep.delta_n > 0.0);
    CHECK(rep.rate_bound_consistent);
    // Non-systematic positions are rejected with an explicit verdict.
    const SystematicReport not_sys = systematic_rate_check(sys, {2, 1}, 0.01);
    CHECK_FALSE(not_sys.systematic);
    CHECK_THROWS_AS(systematic_rate_check(sys, {0}, 0.01), ConfigError);
  }
}
