#include <doctest.h>

#include "codespec/spectra.hpp"

using namespace codespec;

namespace {

// Brute-force ambient spectrum by enumerating every sequence.
Spectrum counted_ambient(Alphabet alpha, std::uint32_t n) {
  Spectrum s(alpha, n);
  const std::uint64_t domain = sat_pow(alpha.q(), n);
  const Rational w(BigInt(1), BigInt::from_uint64(domain));
  for (std::uint64_t i = 0; i < domain; ++i) s.add(type_of(Seq::from_index(alpha, n, i)), w);
  return s;
}

}  // namespace

TEST_SUITE("spectra") {
  TEST_CASE("type_of and class sizes") {
    const Alphabet f2(2);
    const Alphabet f3(3);
    CHECK(type_of(Seq::parse(f2, "0000")).counts() == std::vector<std::uint32_t>{4, 0});
    CHECK(type_of(Seq::parse(f2, "0011")).counts() == std::vector<std::uint32_t>{2, 2});
    CHECK(type_of(Seq::parse(f3, "012")).counts() == std::vector<std::uint32_t>{1, 1, 1});
    CHECK(type_class_size(TypeVector(f2, 4, {4, 0})) == BigInt(1));
    CHECK(type_class_size(TypeVector(f2, 4, {2, 2})) == BigInt(6));
    CHECK(type_class_size(TypeVector(f3, 3, {1, 1, 1})) == BigInt(6));
    CHECK_THROWS_AS(TypeVector(f2, 4, {1, 2}), DomainError);
  }

  TEST_CASE("ambient spectrum equals brute-force counting, n <= 8, q <= 3") {
    for (std::uint32_t q : {2u, 3u}) {
      const Alphabet alpha(q);
      for (std::uint32_t n = 1; n <= 8; ++n) {
        CHECK(ambient_spectrum(n, alpha) == counted_ambient(alpha, n));
      }
    }
    const Alphabet f2(2);
    const Spectrum one = ambient_spectrum(1, f2);
    CHECK(one.at(TypeVector(f2, 1, {1, 0})) == Rational(1, 2));
    const Spectrum two = ambient_spectrum(2, f2);
    CHECK(two.at(TypeVector(f2, 2, {1, 1})) == Rational(1, 2));
    CHECK(two.at(TypeVector(f2, 2, {2, 0})) == Rational(1, 4));
  }

  TEST_CASE("ambient mass is exactly one for n <= 10, q <= 5") {
    for (std::uint32_t q : {2u, 3u, 5u}) {
      for (std::uint32_t n = 1; n <= 10; ++n) {
        CHECK(ambient_spectrum(n, Alphabet(q)).total() == Rational(1));
      }
    }
  }

  TEST_CASE("set spectrum basics") {
    const Alphabet f2(2);
    CHECK_THROWS_AS(set_spectrum({}), DomainError);
    const Spectrum point = set_spectrum({Seq::zeros(f2, 3)});
    CHECK(point.at(TypeVector::zero_type(f2, 3)) == Rational(1));
    std::vector<Seq> all;
    for (std::uint64_t i = 0; i < 8; ++i) all.push_back(Seq::from_index(f2, 3, i));
    CHECK(set_spectrum(all) == ambient_spectrum(3, f2));
  }

  TEST_CASE("product identity on exhaustively enumerated product sets") {
    const Alphabet f2(2);
    std::vector<std::vector<Seq>> sets;
    sets.push_back({Seq::parse(f2, "00"), Seq::parse(f2, "01"), Seq::parse(f2, "11")});
    sets.push_back({Seq::parse(f2, "101"), Seq::parse(f2, "000")});
    std::vector<Spectrum> spectra{set_spectrum(sets[0]), set_spectrum(sets[1])};
    CHECK(product_spectrum(spectra) == product_set_spectrum(sets));
    sets.push_back({Seq::parse(f2, "1"), Seq::parse(f2, "0")});
    spectra.push_back(set_spectrum(sets[2]));
    CHECK(product_spectrum(spectra) == product_set_spectrum(sets));
  }

  TEST_CASE("relation joint spectrum and marginals") {
    const Alphabet f2(2);
    // Identity map on one letter.
    std::vector<std::pair<Seq, Seq>> graph{{Seq::parse(f2, "0"), Seq::parse(f2, "0")},
                                           {Seq::parse(f2, "1"), Seq::parse(f2, "1")}};
    const JointSpectrum js = relation_joint_spectrum(graph);
    CHECK(js.at(TypeVector(f2, 1, {1, 0}), TypeVector(f2, 1, {1, 0})) == Rational(1, 2));
    CHECK(js.at(TypeVector(f2, 1, {0, 1}), TypeVector(f2, 1, {0, 1})) == Rational(1, 2));
    CHECK(js.at(TypeVector(f2, 1, {1, 0}), TypeVector(f2, 1, {0, 1})).is_zero());
    CHECK(js.total() == Rational(1));
    CHECK_THROWS_AS(relation_joint_spectrum({}), DomainError);

    // Constant map: the output marginal is a point mass at the zero type.
    std::vector<std::pair<Seq, Seq>> constant;
    for (std::uint64_t i = 0; i < 4; ++i) {
      constant.emplace_back(Seq::from_index(f2, 2, i), Seq::zeros(f2, 3));
    }
    const JointSpectrum cj = relation_joint_spectrum(constant);
    CHECK(cj.marginal_out().at(TypeVector::zero_type(f2, 3)) == Rational(1));
    // Marginals match the set spectra of the projections.
    std::vector<Seq> ins;
    for (auto& [x, y] : constant) ins.push_back(x);
    CHECK(cj.marginal_in() == set_spectrum(ins));
  }

  TEST_CASE("joint marginalization is always consistent") {
    const Alphabet f2(2);
    Rng rng(12);
    std::vector<std::pair<Seq, Seq>> graph;
    for (std::uint64_t i = 0; i < 8; ++i) {
      graph.emplace_back(Seq::from_index(f2, 3, i), Seq::from_index(f2, 2, rng.below(4)));
    }
    const JointSpectrum js = relation_joint_spectrum(graph);
    Spectrum in_sum(f2, 3), out_sum(f2, 2);
    for (const auto& [key, mass] : js.cells()) {
      in_sum.add(TypeVector(f2, 3, key.first), mass);
      out_sum.add(TypeVector(f2, 2, key.second), mass);
    }
    CHECK(in_sum == js.marginal_in());
    CHECK(out_sum == js.marginal_out());
    CHECK(js.total() == Rational(1));
  }

  TEST_CASE("conditional spectrum") {
    const Alphabet f2(2);
    std::vector<std::pair<Seq, Seq>> graph{{Seq::parse(f2, "0"), Seq::parse(f2, "0")},
                                           {Seq::parse(f2, "1"), Seq::parse(f2, "1")}};
    const JointSpectrum js = relation_joint_spectrum(graph);
    const auto cond = conditional_spectrum(js, ConditionalDirection::kForwardGivenIn,
                                           TypeVector(f2, 1, {1, 0}));
    CHECK(cond.at({1, 0}) == Rational(1));
    // Conditionals sum to one over the free coordinate.
    Rational total(0);
    for (const auto& [key, mass] : cond) total += mass;
    CHECK(total == Rational(1));
    // Conditioning on a type with zero marginal is a domain error.
    std::vector<std::pair<Seq, Seq>> sparse_graph{
        {Seq::parse(f2, "00"), Seq::parse(f2, "00")},
        {Seq::parse(f2, "11"), Seq::parse(f2, "11")}};
    CHECK_THROWS_AS(conditional_spectrum(relation_joint_spectrum(sparse_graph),
                                         ConditionalDirection::kBackwardGivenOut,
                                         TypeVector(f2, 2, {1, 1})),
                    DomainError);
    // Product joint: conditional equals the marginal.
    JointSpectrum prod(f2, 2, f2, 1);
    const Spectrum sa = ambient_spectrum(2, f2);
    const Spectrum sb = ambient_spectrum(1, f2);
    for (const auto& [ka, ma] : sa.cells()) {
      for (const auto& [kb, mb] : sb.cells()) {
        prod.add(TypeVector(f2, 2, ka), TypeVector(f2, 1, kb), ma * mb);
      }
    }
    const auto cond2 = conditional_spectrum(prod, ConditionalDirection::kForwardGivenIn,
                                            TypeVector(f2, 2, {1, 1}));
    for (const auto& [key, mass] : cond2) {
      CHECK(mass == sb.at(TypeVector(f2, 1, key)));
    }
  }

  TEST_CASE("random binning: closed form and exhaustive verifier") {
    const Alphabet f2(2);
    const JointSpectrum expected = random_binning_expected_spectrum(1, f2, 1, f2);
    CHECK(expected.at(TypeVector(f2, 1, {1, 0}), TypeVector(f2, 1, {1, 0})) == Rational(1, 4));
    CHECK(verify_random_binning(1, f2, 1, f2));
    CHECK(verify_random_binning(2, f2, 1, f2));
    CHECK(verify_random_binning(2, f2, 2, f2));
    CHECK_THROWS_AS(verify_random_binning(4, f2, 4, f2), BudgetError);
  }

  TEST_CASE("permutation invariance of the joint spectrum") {
    const Alphabet f2(2);
    std::vector<std::pair<Seq, Seq>> graph;
    Rng rng(5);
    for (std::uint64_t i = 0; i < 8; ++i) {
      graph.emplace_back(Seq::from_index(f2, 3, i), Seq::from_index(f2, 2, rng.below(4)));
    }
    CHECK(check_perm_invariance(graph, Perm::identity(3), Perm::identity(2)));
    for (const Perm& si : all_perms(3)) {
      for (const Perm& so : all_perms(2)) {
        CHECK(check_perm_invariance(graph, si, so));
      }
    }
    // Exhaustive permutation pairs at n = 4, m = 3.
    std::vector<std::pair<Seq, Seq>> graph4;
    for (std::uint64_t i = 0; i < 16; ++i) {
      graph4.emplace_back(Seq::from_index(f2, 4, i), Seq::from_index(f2, 3, rng.below(8)));
    }
    for (const Perm& si : all_perms(4)) {
      for (const Perm& so : all_perms(3)) {
        CHECK(check_perm_invariance(graph4, si, so));
      }
    }
  }

  TEST_CASE("spectrum csv is sorted and exact") {
    const Alphabet f2(2);
    const std::string csv = ambient_spectrum(2, f2).to_csv();
    CHECK(csv == "c0,c1,num,den\n0,2,1,4\n1,1,1,2\n2,0,1,4\n");
  }
}
