#include <doctest.h>

#include <cmath>

#include "codespec/codes.hpp"

using namespace codespec;

namespace {
const Alphabet f2(2);
const Alphabet f3(3);
}  // namespace

TEST_SUITE("codes") {
  TEST_CASE("encode basics") {
    const LinearCode id(Matrix::identity(f2, 3));
    CHECK(id.encode(Seq::zeros(f2, 3)) == Seq::zeros(f2, 3));
    CHECK(id.encode(Seq::parse(f2, "101")) == Seq::parse(f2, "101"));
    const LinearCode rep(Matrix::parse_text("2 1 2\n1 1\n"));
    CHECK(rep.encode(Seq::parse(f2, "1")) == Seq::parse(f2, "11"));
    CHECK(rep.rate() == Rational(1, 2));
    CHECK_THROWS_AS(id.encode(Seq::parse(f2, "10")), DimensionError);
  }

  TEST_CASE("homomorphism, exhaustive for q = 2, n <= 4") {
    Rng rng(21);
    for (std::uint32_t n = 1; n <= 4; ++n) {
      const LinearCode code(random_matrix(n, 3, f2, rng));
      const std::uint64_t domain = std::uint64_t{1} << n;
      for (std::uint64_t i = 0; i < domain; ++i) {
        for (std::uint64_t j = 0; j < domain; ++j) {
          const Seq x1 = Seq::from_index(f2, n, i);
          const Seq x2 = Seq::from_index(f2, n, j);
          CHECK(code.encode(x1 + x2) == code.encode(x1) + code.encode(x2));
        }
      }
    }
  }

  TEST_CASE("kernel and image spectra") {
    // Parity code f(x1, x2) = x1 + x2: kernel {00, 11}.
    const LinearCode parity(Matrix::parse_text("2 2 1\n1\n1\n"));
    const Spectrum ker = kernel_spectrum(parity);
    CHECK(ker.at(TypeVector(f2, 2, {2, 0})) == Rational(1, 2));
    CHECK(ker.at(TypeVector(f2, 2, {0, 2})) == Rational(1, 2));
    // Injective code: kernel is the zero point mass.
    const LinearCode id(Matrix::identity(f2, 2));
    CHECK(kernel_spectrum(id).at(TypeVector::zero_type(f2, 2)) == Rational(1));
    // Surjective code: image spectrum equals the ambient spectrum.
    CHECK(image_spectrum(id) == ambient_spectrum(2, f2));
    CHECK(image_spectrum(parity) == ambient_spectrum(1, f2));
    // Repetition 1 -> 3: image {000, 111}.
    const LinearCode rep(Matrix::parse_text("2 1 3\n1 1 1\n"));
    const Spectrum img = image_spectrum(rep);
    CHECK(img.at(TypeVector(f2, 3, {3, 0})) == Rational(1, 2));
    CHECK(img.at(TypeVector(f2, 3, {0, 3})) == Rational(1, 2));
  }

  TEST_CASE("joint spectrum of the identity on one letter") {
    const LinearCode id(Matrix::identity(f2, 1));
    const JointSpectrum js = joint_spectrum_exact(id);
    CHECK(js.at(TypeVector(f2, 1, {1, 0}), TypeVector(f2, 1, {1, 0})) == Rational(1, 2));
    CHECK(js.at(TypeVector(f2, 1, {0, 1}), TypeVector(f2, 1, {0, 1})) == Rational(1, 2));
    // Any linear code has mass >= q^-n at the (zero, zero) cell.
    Rng rng(3);
    for (int i = 0; i < 20; ++i) {
      const LinearCode code(random_matrix(3, 2, f2, rng));
      CHECK(joint_spectrum_exact(code).at(TypeVector::zero_type(f2, 3),
                                          TypeVector::zero_type(f2, 2)) >= Rational(1, 8));
    }
  }

  TEST_CASE("alpha at the zero input type") {
    for (const CodeEnsemble& ens :
         {CodeEnsemble::deterministic(LinearCode(Matrix::identity(f2, 2))),
          CodeEnsemble::random_linear(f2, 2, 3),
          CodeEnsemble::bernoulli_sparse(f2, 2, 2, Rational(1, 4))}) {
      const AlphaTable table = alpha_table(ens, SpectrumMethod::kEnumerate);
      const TypeVector zero_in = TypeVector::zero_type(f2, ens.input_length());
      const Rational qm(BigInt::pow(BigInt(2), ens.output_length()), BigInt(1));
      for (const TypeVector& q : all_types(f2, ens.output_length())) {
        CHECK(table.at(zero_in, q) == (q.is_zero_type() ? qm : Rational(0)));
      }
    }
  }

  TEST_CASE("alpha is identically 1 for fully enumerated RLC ensembles") {
    for (auto [alpha, n, m] : std::vector<std::tuple<Alphabet, std::uint32_t, std::uint32_t>>{
             {f2, 2, 2}, {f2, 3, 3}, {f2, 2, 3}, {f3, 2, 2}}) {
      const CodeEnsemble rlc = CodeEnsemble::random_linear(alpha, n, m);
      const AlphaTable table = alpha_table(rlc, SpectrumMethod::kEnumerate);
      for (const TypeVector& p : all_types(alpha, n)) {
        if (p.is_zero_type()) continue;
        for (const TypeVector& q : all_types(alpha, m)) {
          CHECK(table.at(p, q) == Rational(1));
        }
      }
    }
  }

  TEST_CASE("alpha of the deterministic identity is 2 at the unit cell") {
    const CodeEnsemble det = CodeEnsemble::deterministic(LinearCode(Matrix::identity(f2, 1)));
    CHECK(alpha(det, TypeVector(f2, 1, {1, 0}), TypeVector(f2, 1, {1, 0})) == Rational(2));
  }

  TEST_CASE("column law agrees with full enumeration") {
    for (const CodeEnsemble& ens :
         {CodeEnsemble::random_linear(f2, 3, 2), CodeEnsemble::random_linear(f3, 2, 2),
          CodeEnsemble::bernoulli_sparse(f2, 3, 3, Rational(1, 4)),
          CodeEnsemble::bernoulli_sparse(f3, 2, 2, Rational(1, 3))}) {
      const ExpectedSpectrum a = expected_joint_spectrum(ens, SpectrumMethod::kEnumerate);
      const ExpectedSpectrum b = expected_joint_spectrum(ens, SpectrumMethod::kColumnLaw);
      CHECK(a.spectrum == b.spectrum);
      CHECK(a.spectrum.total() == Rational(1));
    }
  }

  TEST_CASE("monte carlo estimate is 3-sigma consistent with the exact mean") {
    const CodeEnsemble rlc = CodeEnsemble::random_linear(f2, 2, 2);
    const ExpectedSpectrum exact = expected_joint_spectrum(rlc, SpectrumMethod::kEnumerate);
    Rng rng(1234);
    const ExpectedSpectrum mc = joint_spectrum_mc(rlc, 100000, rng);
    CHECK_FALSE(mc.exact);
    CHECK(mc.samples == 100000);
    CHECK(mc.spectrum.total() == Rational(1));
    for (const auto& [key, mass] : exact.spectrum.cells()) {
      const double p = mass.to_double();
      // Per-cell tallies average 4 indicators per sample; bound the
      // deviation with the per-sequence binomial sigma, which dominates.
      const double sigma = std::sqrt(p * (1 - p) / 100000.0) * 2.0;
      const double est = mc.spectrum.at(TypeVector(f2, 2, key.first),
                                        TypeVector(f2, 2, key.second)).to_double();
      CHECK(std::abs(est - p) <= std::max(3.0 * sigma, 1e-3));
    }
    CHECK_THROWS_AS(joint_spectrum_mc(rlc, 0, rng), DomainError);
  }

  TEST_CASE("goodness: RLC exactly 0, identity ln 2, never negative") {
    const GoodnessReport rlc = goodness_delta(CodeEnsemble::random_linear(f2, 3, 3));
    CHECK(rlc.delta == 0.0);
    CHECK(rlc.max_ratio == Rational(1));
    const GoodnessReport id =
        goodness_delta(CodeEnsemble::deterministic(LinearCode(Matrix::identity(f2, 1))));
    CHECK(id.delta == doctest::Approx(std::log(2.0)));
    Rng rng(8);
    for (int i = 0; i < 10; ++i) {
      const LinearCode code(random_matrix(2, 2, f2, rng));
      CHECK(goodness_delta(CodeEnsemble::deterministic(code)).delta >= 0.0);
    }
  }

  TEST_CASE("goodness argmax tie-break is lexicographic") {
    const GoodnessReport id =
        goodness_delta(CodeEnsemble::deterministic(LinearCode(Matrix::identity(f2, 2))));
    // All diagonal cells share the max; the smallest count vector wins.
    CHECK(id.arg_p == TypeKey{0, 2});
    CHECK(id.arg_q == TypeKey{0, 2});
  }

  TEST_CASE("certify_goodness") {
    // Joint criterion of RLC is 0.
    CHECK(certify_goodness(CodeEnsemble::random_linear(f2, 3, 3), GoodnessCriterion::kJoint).delta ==
          0.0);
    // Image criterion of the repetition code is large and positive.
    const CodeEnsemble rep =
        CodeEnsemble::deterministic(LinearCode(Matrix::parse_text("2 1 4\n1 1 1 1\n")));
    const GoodnessReport img = certify_goodness(rep, GoodnessCriterion::kImage);
    CHECK_FALSE(img.vacuous);
    CHECK(img.delta > 0.5);
    // Kernel criterion of an injective code is vacuously good.
    const CodeEnsemble id = CodeEnsemble::deterministic(LinearCode(Matrix::identity(f2, 2)));
    CHECK(certify_goodness(id, GoodnessCriterion::kKernel).vacuous);
    // Kernel criterion of RLC is finite (singular members put kernel mass
    // on nonzero types); unlike the joint criterion it may sit below 0.
    const GoodnessReport ker =
        certify_goodness(CodeEnsemble::random_linear(f2, 2, 2), GoodnessCriterion::kKernel);
    CHECK_FALSE(ker.vacuous);
    CHECK(ker.max_ratio > Rational(0));
  }

  TEST_CASE("randomized affine codes") {
    const LinearCode code(Matrix::parse_text("2 2 2\n1 1\n0 1\n"));
    const RandomizedAffineCode trivial = RandomizedAffineCode::trivial(code);
    for (std::uint64_t i = 0; i < 4; ++i) {
      const Seq x = Seq::from_index(f2, 2, i);
      CHECK(trivial.evaluate(x) == code.encode(x));
    }
    Rng rng(17);
    const RandomizedAffineCode rc = randomize(code, rng);
    CHECK(rc.evaluate(Seq::zeros(f2, 2)) == rc.offset());

    // Law check: over all 2! * 2! * 4 randomizations of a fixed code,
    // Pr{F̂(x) = y} = 1/4 for every x, y.
    std::vector<std::vector<std::uint32_t>> counts(4, std::vector<std::uint32_t>(4, 0));
    for (const Perm& si : all_perms(2)) {
      for (const Perm& so : all_perms(2)) {
        for (std::uint64_t c = 0; c < 4; ++c) {
          const RandomizedAffineCode r(code, si, so, Seq::from_index(f2, 2, c));
          for (std::uint64_t x = 0; x < 4; ++x) {
            counts[x][r.evaluate(Seq::from_index(f2, 2, x)).to_index()]++;
          }
        }
      }
    }
    for (const auto& row : counts) {
      for (std::uint32_t c : row) CHECK(c == 4);  // 16 randomizations / 4 outputs
    }
  }

  TEST_CASE("encoder serialization round trip") {
    Rng rng(23);
    const RandomizedAffineCode rc = randomize(LinearCode(random_matrix(3, 4, f2, rng)), rng);
    const RandomizedAffineCode back = RandomizedAffineCode::parse_text(rc.to_text());
    CHECK(back.to_text() == rc.to_text());
    for (std::uint64_t i = 0; i < 8; ++i) {
      const Seq x = Seq::from_index(f2, 3, i);
      CHECK(back.evaluate(x) == rc.evaluate(x));
    }
  }

  TEST_CASE("pairwise independence identities") {
    const auto rlc = verify_pairwise_independence(CodeEnsemble::random_linear(f2, 2, 2));
    CHECK(rlc.uniform_marginal_ok);
    CHECK(rlc.conditional_ok);
    CHECK(rlc.max_defect.is_zero());
    CHECK(rlc.randomizations == 16 * 2 * 2 * 4);
    // Deterministic identity on one letter: the offset uniformizes the
    // marginal, and the conditional law reduces to the deterministic alpha.
    const auto det = verify_pairwise_independence(
        CodeEnsemble::deterministic(LinearCode(Matrix::identity(f2, 1))));
    CHECK(det.uniform_marginal_ok);
    CHECK(det.conditional_ok);
    CHECK(det.max_defect.is_zero());
  }

  TEST_CASE("sample_certified_code honors the certification bound") {
    Rng rng(31);
    const CodeEnsemble rlc = CodeEnsemble::random_linear(f2, 2, 2);
    const CertifiedSample sample = sample_certified_code(rlc, 3.0, 3.0, rng, 100);
    CHECK(sample.ratio.to_double() < sample.threshold);
    CHECK(sample.tries >= 1);
    // The identity generator passes with ratio 2.
    const CodeEnsemble id = CodeEnsemble::deterministic(LinearCode(Matrix::identity(f2, 2)));
    const CertifiedSample fixed = sample_certified_code(id, 3.0, 3.0, rng, 1);
    // Exact enumeration: the binding cell is (P, Q) = ((0,2), (0,2)) with
    // S = 1/4 against ambient 1/16.
    CHECK(fixed.ratio == Rational(4));
    CHECK_THROWS_AS(sample_certified_code(rlc, 1.0, 3.0, rng, 4), DomainError);
  }

  TEST_CASE("ensemble plumbing") {
    const CodeEnsemble rlc = CodeEnsemble::random_linear(f2, 2, 2);
    CHECK(rlc.enumeration_size() == 16);
    CHECK(rlc.enumerate().size() == 16);
    CHECK_THROWS_AS(rlc.enumerate(8), BudgetError);
    const CodeEnsemble sparse = CodeEnsemble::bernoulli_sparse(f3, 1, 1, Rational(1, 4));
    Rational total(0);
    for (const auto& [code, w] : sparse.enumerate()) total += w;
    CHECK(total == Rational(1));
    CHECK_THROWS_AS(CodeEnsemble::explicit_list({}), DomainError);
    CHECK_THROWS_AS(
        CodeEnsemble::explicit_list({{LinearCode(Matrix::identity(f2, 2)), Rational(1, 2)}}),
        DomainError);
    // Bernoulli sampling matches the entry law within 3 sigma.
    Rng rng(77);
    std::uint64_t nonzero = 0;
    const std::uint64_t draws = 4000;
    for (std::uint64_t i = 0; i < draws; ++i) {
      Rng child = rng.split(i);
      const LinearCode code = sparse.sample(child);
      for (Symbol e : code.generator().entries()) {
        if (e != 0) ++nonzero;
      }
    }
    const double mean = static_cast<double>(nonzero) / draws;
    CHECK(std::abs(mean - 0.25) <= 3.0 * std::sqrt(0.25 * 0.75 / draws));
  }

  TEST_CASE("interleaving a code never changes its joint spectrum") {
    Rng rng(41);
    const LinearCode code(random_matrix(3, 2, f2, rng));
    const JointSpectrum base = joint_spectrum_exact(code);
    for (const Perm& si : all_perms(3)) {
      for (const Perm& so : all_perms(2)) {
        const RandomizedAffineCode rc(code, si, so, Seq::zeros(f2, 2));
        std::vector<std::pair<Seq, Seq>> graph;
        for (std::uint64_t i = 0; i < 8; ++i) {
          const Seq x = Seq::from_index(f2, 3, i);
          graph.emplace_back(x, rc.evaluate(x));
        }
        CHECK(relation_joint_spectrum(graph) == base);
      }
    }
  }
}
