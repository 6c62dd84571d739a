#include "codespec/verify.hpp"

#include <cmath>
#include <functional>
#include <sstream>

#include "codespec/analysis.hpp"
#include "codespec/channel.hpp"

namespace codespec {

namespace {

using Status = VerifyCheck::Status;

struct Runner {
  const VerifyOptions& options;
  std::vector<VerifyCheck> results;

  void run(const std::string& name, bool exact, const std::function<std::string()>& body) {
    VerifyCheck check;
    check.name = name;
    check.exact = exact;
    if (options.budget == 0) {
      check.status = Status::kSkip;
      check.detail = "budget 0";
      results.push_back(std::move(check));
      return;
    }
    try {
      check.detail = body();
      check.status = Status::kPass;
    } catch (const BudgetError& e) {
      check.status = Status::kSkip;
      check.detail = e.what();
    } catch (const std::exception& e) {
      check.status = Status::kFail;
      check.detail = e.what();
    }
    results.push_back(std::move(check));
  }
};

void require(bool condition, const std::string& message) {
  if (!condition) throw std::runtime_error(message);
}

std::string brute_force_ambient_check(std::uint32_t q, std::uint32_t n, std::uint64_t budget) {
  const Alphabet alpha(q);
  const Spectrum ambient = ambient_spectrum(n, alpha);
  const std::uint64_t domain = sat_pow(q, n);
  check_budget(domain, budget, "ambient brute force");
  Spectrum counted(alpha, n);
  const Rational w(BigInt(1), BigInt::from_uint64(domain));
  for (std::uint64_t i = 0; i < domain; ++i) {
    counted.add(type_of(Seq::from_index(alpha, n, i)), w);
  }
  require(counted == ambient, "ambient spectrum != brute-force counting");
  require(ambient.total() == Rational(1), "ambient mass != 1");
  return "q=" + std::to_string(q) + " n=" + std::to_string(n);
}

void props_suite(Runner& r) {
  r.run("ambient_vs_counting", true, [&] {
    std::string detail;
    for (std::uint32_t q : {2u, 3u}) {
      for (std::uint32_t n = 1; n <= 6; ++n) {
        detail = brute_force_ambient_check(q, n, r.options.budget);
      }
    }
    return "all n <= 6, q in {2,3}; last " + detail;
  });

  r.run("product_spectrum_identity", true, [&] {
    const Alphabet f2(2);
    // 2-fold and 3-fold product sets with n_i <= 3.
    std::vector<std::vector<Seq>> sets;
    Rng rng(r.options.seed);
    for (std::uint32_t ni : {2u, 3u, 1u}) {
      std::vector<Seq> set;
      const std::uint64_t domain = sat_pow(2, ni);
      for (std::uint64_t i = 0; i < domain; ++i) {
        if (rng.below(3) != 0 || set.empty()) set.push_back(Seq::from_index(f2, ni, i));
      }
      sets.push_back(std::move(set));
    }
    for (std::size_t k = 2; k <= 3; ++k) {
      std::vector<std::vector<Seq>> part(sets.begin(), sets.begin() + k);
      std::vector<Spectrum> spectra;
      for (const auto& s : part) spectra.push_back(set_spectrum(s));
      require(product_spectrum(spectra) == product_set_spectrum(part, r.options.budget),
              "product identity failed at k=" + std::to_string(k));
    }
    return "k = 2, 3 with n_i <= 3";
  });

  r.run("random_binning_mean", true, [&] {
    const Alphabet f2(2);
    for (auto [n, m] : std::vector<std::pair<std::uint32_t, std::uint32_t>>{
             {1, 1}, {2, 1}, {1, 2}, {2, 2}}) {
      require(verify_random_binning(n, f2, m, f2, r.options.budget),
              "random binning mean != closed form at n=" + std::to_string(n) +
                  " m=" + std::to_string(m));
    }
    return "(n,m) in {(1,1),(2,1),(1,2),(2,2)}, q=2";
  });

  r.run("interleaver_invariance", true, [&] {
    const Alphabet f2(2);
    const LinearCode f(Matrix::parse_text("2 3 2\n1 0\n1 1\n0 1\n"));
    const auto graph = f.graph(r.options.budget);
    for (const Perm& si : all_perms(3, r.options.budget)) {
      for (const Perm& so : all_perms(2, r.options.budget)) {
        require(check_perm_invariance(graph, si, so), "interleaver invariance failed on a permutation pair");
      }
    }
    // A random (nonlinear) map too.
    Rng rng(r.options.seed);
    std::vector<std::pair<Seq, Seq>> arbitrary;
    for (std::uint64_t i = 0; i < 8; ++i) {
      arbitrary.emplace_back(Seq::from_index(f2, 3, i),
                             Seq::from_index(f2, 2, rng.below(4)));
    }
    const Perm si = random_perm(3, rng);
    const Perm so = random_perm(2, rng);
    require(check_perm_invariance(arbitrary, si, so), "interleaver invariance failed on a random map");
    return "exhaustive sigma pairs at n=3, m=2 plus a random map";
  });

  r.run("alpha_at_zero_input_type", true, [&] {
    const Alphabet f2(2);
    std::vector<CodeEnsemble> ensembles;
    ensembles.push_back(CodeEnsemble::deterministic(LinearCode(Matrix::identity(f2, 2))));
    ensembles.push_back(
        CodeEnsemble::deterministic(LinearCode(Matrix::parse_text("2 1 3\n1 1 1\n"))));
    ensembles.push_back(CodeEnsemble::random_linear(f2, 2, 2));
    for (const CodeEnsemble& ens : ensembles) {
      const AlphaTable table = alpha_table(ens, SpectrumMethod::kEnumerate, r.options.budget);
      const std::uint32_t m = ens.output_length();
      const TypeVector zero_in = TypeVector::zero_type(f2, ens.input_length());
      const Rational qm(BigInt::pow(BigInt(2), m), BigInt(1));
      for (const TypeVector& qt : all_types(f2, m)) {
        const Rational expected = qt.is_zero_type() ? qm : Rational(0);
        require(table.at(zero_in, qt) == expected, "zero-input alpha identity failed");
      }
    }
    return "identity, repetition, RLC(2,2,2)";
  });

  r.run("rlc_alpha_identity", true, [&] {
    for (auto [q, n, m] : std::vector<std::array<std::uint32_t, 3>>{
             {2, 2, 2}, {2, 3, 3}, {2, 3, 2}, {3, 2, 2}}) {
      const Alphabet alpha(q);
      const CodeEnsemble rlc = CodeEnsemble::random_linear(alpha, n, m);
      AlphaTable table = alpha_table(rlc, SpectrumMethod::kEnumerate, r.options.budget);
      if (r.options.inject_alpha_fault) {
        // Test hook: corrupt the first cell.
        table.values.begin()->second += Rational(1);
      }
      for (const TypeVector& p : all_types(alpha, n)) {
        if (p.is_zero_type()) continue;
        for (const TypeVector& qt : all_types(alpha, m)) {
          require(table.at(p, qt) == Rational(1), "rlc alpha identity failed: alpha != 1");
        }
      }
    }
    return "full matrix enumeration, q^(nm) up to 2^9";
  });

  r.run("pairwise_independence", true, [&] {
    const Alphabet f2(2);
    const auto rlc_report =
        verify_pairwise_independence(CodeEnsemble::random_linear(f2, 2, 2), r.options.budget);
    require(rlc_report.uniform_marginal_ok && rlc_report.conditional_ok,
            "pairwise independence failed for RLC(2,2,2)");
    require(rlc_report.max_defect.is_zero(), "pairwise independence defect nonzero");
    const auto det_report = verify_pairwise_independence(
        CodeEnsemble::deterministic(LinearCode(Matrix::identity(f2, 1))), r.options.budget);
    require(det_report.uniform_marginal_ok, "uniform marginal failed for the deterministic code");
    return "RLC(2,2,2) and deterministic identity";
  });
}

void encoder_suite(Runner& r) {
  const Alphabet f2(2);

  r.run("encoder_law_identities", true, [&] {
    const auto uniform =
        ConditionalPmf::per_symbol_marginal(f2, 2, f2, 2, {Rational(1, 2), Rational(1, 2)});
    const QuantizerBuild qb = build_quantizer(uniform, f2, 2, r.options.budget);
    const EncoderLawReport report = verify_encoder_law(CodeEnsemble::random_linear(f2, 2, 2),
                                              qb.quantizer, r.options.budget);
    require(report.marginal_ok && report.pairwise_ok && report.max_defect.is_zero(),
            "encoder law identities failed");
    return "n=l=m=2, q=2, exhaustive randomizations";
  });

  r.run("quantizer_adic_exact", true, [&] {
    const auto target =
        ConditionalPmf::per_symbol_marginal(f2, 1, f2, 1, {Rational(3, 4), Rational(1, 4)});
    const QuantizerBuild qb = build_quantizer(target, f2, 2, r.options.budget);
    require(qb.max_tv.is_zero() && !qb.starved, "adic target not realized exactly");
    require(qb.quantizer.evaluate_block(0, 3) == 1, "slot order mismatch");
    return "P=(3/4,1/4), l0=2: slots {00,01,10}->0, {11}->1";
  });

  r.run("quantizer_nonadic_tv_bound", true, [&] {
    const auto target =
        ConditionalPmf::per_symbol_marginal(f2, 1, f2, 1, {Rational(1, 3), Rational(2, 3)});
    for (std::uint32_t l : {1u, 2u, 3u, 4u}) {
      const QuantizerBuild qb = build_quantizer(target, f2, l, r.options.budget);
      const Rational limit = Rational(1, 1) / Rational(BigInt::pow(BigInt(2), l), BigInt(1));
      require(qb.max_tv <= limit, "TV above q^-l |X|/2 at l=" + std::to_string(l));
    }
    return "P=(1/3,2/3) at l0 in 1..4";
  });

  r.run("rho_rlc_zero", true, [&] {
    const auto uniform =
        ConditionalPmf::per_symbol_marginal(f2, 2, f2, 2, {Rational(1, 2), Rational(1, 2)});
    const QuantizerBuild qb = build_quantizer(uniform, f2, 2, r.options.budget);
    const CodeEnsemble rlc = CodeEnsemble::random_linear(f2, 2, 2);
    const AlphaTable table = alpha_table(rlc, SpectrumMethod::kEnumerate, r.options.budget);
    const RhoReport rho = rho_encoder(table, qb.quantizer, r.options.budget);
    require(rho.max_beta_prime == Rational(1) && rho.rho == 0.0, "rho(RLC encoder) != 0");
    return "beta' == 1 identically";
  });

  r.run("rho_identity_ln2", true, [&] {
    const auto uniform =
        ConditionalPmf::per_symbol_marginal(f2, 1, f2, 1, {Rational(1, 2), Rational(1, 2)});
    const QuantizerBuild qb = build_quantizer(uniform, f2, 1, r.options.budget);
    const CodeEnsemble det = CodeEnsemble::deterministic(LinearCode(Matrix::identity(f2, 1)));
    const AlphaTable table = alpha_table(det, SpectrumMethod::kEnumerate, r.options.budget);
    const RhoReport rho = rho_encoder(table, qb.quantizer, r.options.budget);
    require(std::abs(rho.rho - std::log(2.0)) < 1e-12, "rho(identity, n=1) != ln 2");
    return "rho = ln 2";
  });

  r.run("rho_max_agreement", true, [&] {
    const auto uniform =
        ConditionalPmf::per_symbol_marginal(f2, 2, f2, 2, {Rational(1, 2), Rational(1, 2)});
    const QuantizerBuild qb = build_quantizer(uniform, f2, 2, r.options.budget);
    const CodeEnsemble det = CodeEnsemble::deterministic(LinearCode(Matrix::identity(f2, 2)));
    const EncoderLawTable law =
        EncoderLawTable::from_linear_ensemble(det, qb.quantizer, r.options.budget);
    const AlphaTable table = alpha_table(det, SpectrumMethod::kEnumerate, r.options.budget);
    const RhoReport rho = rho_encoder(table, qb.quantizer, r.options.budget);
    require(std::abs(rho.rho - rho_max_single(law)) < 1e-12,
            "rho via beta' disagrees with the brute-force law maximization");
    return "identity code, n=l=2";
  });

  r.run("rho_max_product_construction_zero", true, [&] {
    const auto pmf =
        ConditionalPmf::per_symbol_marginal(f2, 1, f2, 1, {Rational(3, 4), Rational(1, 4)});
    const EncoderLawTable law = EncoderLawTable::from_product_pmf(pmf, r.options.budget);
    require(rho_max_single(law) == 0.0, "independent-codeword construction has rho_max != 0");
    return "all functions enumerated with product weights";
  });

  r.run("puncturing_consistency", true, [&] {
    Rng rng(r.options.seed);
    const LinearCode low_rate(Matrix::parse_text("2 2 6\n1 0 1 1 0 1\n0 1 1 0 1 1\n"));
    const PuncturedEncoder pe = build_punctured_encoder(
        low_rate, {Rational(3, 4), Rational(1, 4)}, f2, 2, rng);
    require(pe.scheme.l0 == 2, "unexpected block size");
    // Blockwise application by hand must match encode_jscc.
    for (std::uint64_t vi = 0; vi < 4; ++vi) {
      const Seq v = Seq::from_index(f2, 2, vi);
      const Seq u = pe.encoder.randomization().evaluate(v);
      std::vector<Symbol> manual;
      for (std::uint32_t b = 0; b < pe.scheme.m; ++b) {
        std::uint64_t rank = 0;
        for (std::uint32_t t = 0; t < pe.scheme.l0; ++t) {
          rank = rank * 2 + u[b * pe.scheme.l0 + t];
        }
        manual.push_back(rank < pe.scheme.slot_counts[0] ? 0 : 1);
      }
      require(pe.encoder.encode(v) == Seq(f2, manual), "blockwise application mismatch");
    }
    return "front blocks quantized, tail discarded";
  });
}

void analysis_suite(Runner& r) {
  const Alphabet f2(2);

  r.run("certified_sample_search", true, [&] {
    Rng rng(r.options.seed);
    const CodeEnsemble rlc = CodeEnsemble::random_linear(f2, 2, 2);
    const CertifiedSample sample = sample_certified_code(rlc, 3.0, 3.0, rng, 64, r.options.budget);
    require(sample.ratio.to_double() < sample.threshold, "returned sample violates the certification bound");
    return "ratio " + sample.ratio.to_string() + " < (n+1)^3 (m+1)^3 after " +
           std::to_string(sample.tries) + " tries";
  });

  r.run("distance_trend", false, [&] {
    Rng rng(r.options.seed);
    const DistanceReport report = distance_check(f2, 2, {4, 6}, 0.3, 0.3, 0.0, 6, 2000, rng,
                                                 r.options.budget);
    require(report.condition_met, "condition unexpectedly unmet");
    require(report.within_bound, "E|B| exceeded the proof bound");
    require(report.non_increasing, "E|B| increased along n");
    return "rate 1/2, exact rows at n in {4,6}";
  });

  r.run("gv_rlc_samples", false, [&] {
    Rng rng(r.options.seed);
    const GvReport report = gv_check(f2, 8, 16, 30, 0.15, rng, r.options.budget);
    require(report.pass_fraction >= 0.9, "GV pass fraction below 0.9");
    return "pass fraction " + format_g12(report.pass_fraction);
  });

  r.run("sparse_non_goodness", false, [&] {
    Rng rng(r.options.seed);
    const SparseReport report = sparse_non_goodness_check(f2, Rational(1, 4), {4, 6}, 0.05, 6,
                                                          2000, rng, r.options.budget);
    require(report.floor_met, "sparse delta fell below the floor");
    require(report.no_significant_drop, "sparse delta dropped significantly");
    return "Bernoulli(1/4), n in {4,6}";
  });

  r.run("rlc_delta_zero_control", true, [&] {
    for (std::uint32_t n : {4u, 6u}) {
      const GoodnessReport g = goodness_delta(CodeEnsemble::random_linear(f2, n, n),
                                              SpectrumMethod::kColumnLaw, r.options.budget);
      require(g.max_ratio == Rational(1) && g.delta == 0.0, "RLC control delta != 0");
    }
    return "column-law exact at n in {4,6}";
  });

  r.run("systematic_rate", true, [&] {
    // Rate 2/3 systematic binary code: delta_n must be positive.
    const LinearCode sys23(Matrix::parse_text("2 2 3\n1 0 1\n0 1 1\n"));
    const SystematicReport report = systematic_rate_check(sys23, {0, 1}, 0.01, r.options.budget);
    require(report.systematic && !report.boundary, "fixture should be checkable");
    require(report.rate_bound_consistent && report.delta_n > 0.0,
            "rate > 1/q did not force positive delta");
    // Rate 1/2 sits on the boundary: no claim.
    const LinearCode sys12(Matrix::parse_text("2 1 2\n1 1\n"));
    const SystematicReport boundary = systematic_rate_check(sys12, {0}, 0.01, r.options.budget);
    require(boundary.boundary, "rate 1/2 over F_2 should be boundary");
    return "rate 2/3 flagged, rate 1/2 boundary";
  });

  r.run("density_concentration", false, [&] {
    Rng rng(r.options.seed);
    const CodeEnsemble ens = CodeEnsemble::bernoulli_sparse(f2, 4, 4, Rational(1, 4));
    double sum = 0.0;
    const std::uint64_t samples = 10000;
    for (std::uint64_t s = 0; s < samples; ++s) {
      Rng child = rng.split(s);
      sum += matrix_density(ens.sample(child).generator()).density;
    }
    const double mean = sum / samples;
    const double sigma = std::sqrt(0.25 * 0.75 / (16.0 * samples));
    require(std::abs(mean - 0.25) <= 3.0 * sigma, "empirical density off by > 3 sigma");
    return "mean density " + format_g12(mean);
  });
}

}  // namespace

std::vector<VerifyCheck> verify_suite(const std::string& suite, const VerifyOptions& options) {
  Runner runner{options, {}};
  if (suite == "props") {
    props_suite(runner);
  } else if (suite == "encoder") {
    encoder_suite(runner);
  } else if (suite == "analysis") {
    analysis_suite(runner);
  } else if (suite == "all") {
    props_suite(runner);
    encoder_suite(runner);
    analysis_suite(runner);
  } else {
    throw ConfigError("unknown verify suite: " + suite);
  }
  return runner.results;
}

bool verify_all_passed(const std::vector<VerifyCheck>& checks) {
  for (const VerifyCheck& c : checks) {
    if (c.status == VerifyCheck::Status::kFail) return false;
  }
  return true;
}

}  // namespace codespec
