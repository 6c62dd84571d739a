#include <doctest.h>

#include <cmath>

#include "codespec/channel.hpp"

using namespace codespec;

namespace {
const Alphabet f2(2);

SimConfig base_config(SourceModel source, MacModel mac) {
  SimConfig cfg{std::move(source), std::move(mac)};
  cfg.n_list = {4};
  cfg.trials = 500;
  cfg.seed = 7;
  cfg.gamma_fixed = 0.1;
  return cfg;
}
}  // namespace

TEST_SUITE("channel") {
  TEST_CASE("source model validation and sampling") {
    CHECK_THROWS_AS(SourceModel::single(f2, {Rational(1, 2), Rational(1, 3)}), DomainError);
    // Point mass: constant sequences.
    const SourceModel point = SourceModel::single(f2, {Rational(1), Rational(0)});
    Rng rng(1);
    for (const Seq& s : point.sample(16, rng)) CHECK(s.is_zero());
    // DSBS(0.1): empirical disagreement within 3 sigma over 1e5 letters.
    const SourceModel dsbs = SourceModel::doubly_symmetric_binary(Rational(1, 10));
    const std::size_t letters = 100000;
    const std::vector<Seq> v = dsbs.sample(letters, rng);
    std::size_t disagree = 0, ones = 0;
    for (std::size_t t = 0; t < letters; ++t) {
      if (v[0][t] != v[1][t]) ++disagree;
      if (v[0][t] == 1) ++ones;
    }
    const double p_hat = static_cast<double>(disagree) / letters;
    CHECK(std::abs(p_hat - 0.1) <= 3.0 * std::sqrt(0.1 * 0.9 / letters));
    // Marginal of terminal 1 is uniform.
    const double m_hat = static_cast<double>(ones) / letters;
    CHECK(std::abs(m_hat - 0.5) <= 3.0 * std::sqrt(0.25 / letters));
  }

  TEST_CASE("mac model validation and transmission") {
    CHECK_THROWS_AS(MacModel({f2}, 2, {Rational(1, 2), Rational(1, 3), Rational(0), Rational(1)}),
                    DomainError);
    Rng rng(2);
    // Noiseless identity: output equals input.
    const MacModel clean = MacModel::noiseless(f2);
    const Seq x = random_uniform_seq(32, f2, rng);
    const std::vector<std::uint32_t> y = clean.transmit({x}, rng);
    for (std::size_t t = 0; t < 32; ++t) CHECK(y[t] == x[t]);
    // Binary adder: inputs (1,1) always give 2.
    const MacModel adder = MacModel::binary_adder();
    const Seq ones(f2, std::vector<Symbol>(8, 1));
    for (std::uint32_t yt : adder.transmit({ones, ones}, rng)) CHECK(yt == 2);
    // BSC(0.1): empirical flip rate within 3 sigma.
    const MacModel bsc = MacModel::bsc(Rational(1, 10));
    const std::size_t letters = 100000;
    const Seq zeros = Seq::zeros(f2, letters);
    std::size_t flips = 0;
    for (std::uint32_t yt : bsc.transmit({zeros}, rng)) flips += yt;
    const double f_hat = static_cast<double>(flips) / letters;
    CHECK(std::abs(f_hat - 0.1) <= 3.0 * std::sqrt(0.09 / letters));
  }

  TEST_CASE("system law: noiseless identity information density") {
    // K=1, uniform encoder pmf, noiseless channel: the subset stat is
    // ln 2 + ln P(v) ... i = ln q exactly when y = x, and h = ln 1/P(v).
    const SourceModel src = SourceModel::single(f2, {Rational(3, 4), Rational(1, 4)});
    const SystemLaw law(src, {LetterPmf::uniform(f2, f2)}, MacModel::noiseless(f2));
    // g = ln(W * P(v) / T) with T(y) = 1/2: for (v=0, x, y=x): ln(2 * 3/4).
    CHECK(law.subset_stat(1, 0, 0, 0) == doctest::Approx(std::log(1.5)));
    CHECK(law.subset_stat(1, 1, 1, 1) == doctest::Approx(std::log(0.5)));
    // Mismatched y has W = 0: never typical.
    CHECK(law.subset_stat(1, 0, 0, 1) < -1e290);
    // h of a deterministic source letter contributes 0: g = ln(W/T) = ln 1.
    const SourceModel det = SourceModel::single(f2, {Rational(1), Rational(0)});
    const SystemLaw det_law(det, {LetterPmf::uniform(f2, f2)}, MacModel::noiseless(f2));
    CHECK(det_law.subset_stat(1, 0, 0, 0) == doctest::Approx(std::log(2.0)));
  }

  TEST_CASE("system law factorizes with mass exactly one") {
    const SourceModel dsbs = SourceModel::doubly_symmetric_binary(Rational(1, 16));
    const std::vector<LetterPmf> pmfs(2, LetterPmf::uniform(f2, f2));
    const SystemLaw law(dsbs, pmfs, MacModel::binary_adder());
    Rational total(0);
    for (std::uint64_t vt = 0; vt < law.v_card(); ++vt) {
      for (std::uint64_t xt = 0; xt < law.x_card(); ++xt) {
        for (std::uint32_t y = 0; y < law.y_card(); ++y) {
          const Rational& p = law.letter_prob(vt, xt, y);
          CHECK(p.sign() >= 0);
          total += p;
          // Product form: p(v) P(x1|v1) P(x2|v2) W(y|x).
          const Rational expect = dsbs.prob(vt) * Rational(1, 4) *
                                  MacModel::binary_adder().prob(xt, y);
          CHECK(p == expect);
        }
      }
    }
    CHECK(total == Rational(1));
  }

  TEST_CASE("single-letter quantities: closed forms") {
    // K=1, uniform binary source, identity pmf, noiseless channel.
    const SourceModel uni = SourceModel::single(f2, {Rational(1, 2), Rational(1, 2)});
    const InfoQuantities iq =
        single_letter_quantities(uni, {LetterPmf::uniform(f2, f2)}, MacModel::noiseless(f2));
    CHECK(iq.subsets[0].h_cond == doctest::Approx(std::log(2.0)));
    CHECK(iq.subsets[0].i_cond == doctest::Approx(std::log(2.0)));
    CHECK(iq.subsets[0].margin == doctest::Approx(0.0));
    // DSBS(0.11): H(V1|V2) = h(0.11) = 0.34646 nats.
    const SourceModel dsbs = SourceModel::doubly_symmetric_binary(Rational(11, 100));
    const InfoQuantities iq2 = single_letter_quantities(
        dsbs, {LetterPmf::uniform(f2, f2), LetterPmf::uniform(f2, f2)}, MacModel::binary_adder());
    CHECK(iq2.subsets[0].h_cond == doctest::Approx(0.3465153369).epsilon(1e-9));
    // Deterministic source: every conditional entropy is 0.
    const SourceModel det = SourceModel::single(f2, {Rational(1), Rational(0)});
    const InfoQuantities iq3 =
        single_letter_quantities(det, {LetterPmf::uniform(f2, f2)}, MacModel::noiseless(f2));
    CHECK(iq3.subsets[0].h_cond == doctest::Approx(0.0));
    CHECK(iq3.subsets[0].margin > 0.0);
    // Block quantities scale: N = 2 equals N = 1 for memoryless laws.
    const InfoQuantities blocked = single_letter_quantities(
        dsbs, {LetterPmf::uniform(f2, f2), LetterPmf::uniform(f2, f2)}, MacModel::binary_adder(),
        2);
    for (std::size_t s = 0; s < blocked.subsets.size(); ++s) {
      CHECK(blocked.subsets[s].h_cond == doctest::Approx(iq2.subsets[s].h_cond));
      CHECK(blocked.subsets[s].i_cond == doctest::Approx(iq2.subsets[s].i_cond));
    }
  }

  TEST_CASE("exact atypicality equals a direct sequence-space oracle") {
    // Small enough to enumerate every (v^n, x^n, y^n) directly.
    const SourceModel src = SourceModel::single(f2, {Rational(3, 4), Rational(1, 4)});
    const MacModel mac = MacModel::bsc(Rational(1, 8));
    const std::vector<LetterPmf> pmfs{LetterPmf::uniform(f2, f2)};
    const SystemLaw law(src, pmfs, mac);
    const std::uint32_t n = 3;
    const double gamma = 0.15;

    // Oracle: product probabilities over letter tuples, thresholds on sums.
    Rational atypical(0);
    for (std::uint64_t vi = 0; vi < 8; ++vi) {
      for (std::uint64_t xi = 0; xi < 8; ++xi) {
        for (std::uint64_t yi = 0; yi < 8; ++yi) {
          Rational p(1);
          double stat = 0.0;
          for (std::uint32_t t = 0; t < n; ++t) {
            const std::uint32_t v = (vi >> (n - 1 - t)) & 1;
            const std::uint32_t x = (xi >> (n - 1 - t)) & 1;
            const std::uint32_t y = (yi >> (n - 1 - t)) & 1;
            p *= law.letter_prob(v, x, y);
            stat += law.subset_stat(1, v, x, y);
          }
          if (p.is_zero()) continue;
          if (!(stat > n * gamma)) atypical += p;
        }
      }
    }
    const DecodingErrorBound bound = decoding_error_bound(law, n, gamma);
    CHECK(bound.atypicality == doctest::Approx(atypical.to_double()).epsilon(1e-12));
    CHECK(bound.union_penalty == doctest::Approx(std::exp(-3.0 * gamma)));

    // Monte Carlo agrees within 3 sigma.
    Rng rng(55);
    const DecodingErrorBound mc = decoding_error_bound_mc(law, n, gamma, 50000, rng);
    const double sigma = std::sqrt(bound.atypicality * (1 - bound.atypicality) / 50000.0);
    CHECK(std::abs(mc.atypicality - bound.atypicality) <= 3.0 * sigma);
  }

  TEST_CASE("atypicality is monotone in gamma") {
    const SourceModel src = SourceModel::doubly_symmetric_binary(Rational(1, 16));
    const std::vector<LetterPmf> pmfs(2, LetterPmf::uniform(f2, f2));
    const SystemLaw law(src, pmfs, MacModel::binary_adder());
    double prev = -1.0;
    for (double gamma : {0.05, 0.1, 0.2, 0.4}) {
      const DecodingErrorBound b = decoding_error_bound(law, 4, gamma);
      CHECK(b.atypicality >= prev);
      prev = b.atypicality;
    }
  }

  TEST_CASE("map decode equals minimum Hamming distance for uniform prior over a BSC") {
    const std::uint32_t n = 4;
    const SourceModel uni = SourceModel::single(f2, {Rational(1, 2), Rational(1, 2)});
    const MacModel bsc = MacModel::bsc(Rational(1, 10));
    const SystemLaw law(uni, {LetterPmf::uniform(f2, f2)}, bsc);
    DecoderSpec spec;
    spec.gamma = 0.05;
    spec.mode = DecoderMode::kMap;
    const JointDecoder decoder(law, spec, n);

    Rng rng(61);
    const RandomizedAffineCode rc =
        RandomizedAffineCode::draw(LinearCode(Matrix::identity(f2, n)), rng);
    std::vector<Symbol> flat(16 * n);
    for (std::uint64_t ci = 0; ci < 16; ++ci) {
      const Seq x = rc.evaluate(Seq::from_index(f2, n, ci));
      std::copy(x.symbols().begin(), x.symbols().end(), flat.begin() + ci * n);
    }
    DecodeWorkspace ws;
    for (std::uint64_t yi = 0; yi < 16; ++yi) {
      std::vector<std::uint32_t> y(n);
      for (std::uint32_t t = 0; t < n; ++t) y[t] = (yi >> (n - 1 - t)) & 1;
      const DecodeOutcome outcome = decoder.decode(y, {flat.data()}, ws);
      // Oracle: lexicographically first candidate at minimum Hamming
      // distance from y.
      std::uint64_t best = 0;
      std::uint32_t best_dist = n + 1;
      for (std::uint64_t ci = 0; ci < 16; ++ci) {
        std::uint32_t dist = 0;
        for (std::uint32_t t = 0; t < n; ++t) {
          if (flat[ci * n + t] != y[t]) ++dist;
        }
        if (dist < best_dist) {
          best_dist = dist;
          best = ci;
        }
      }
      CHECK(outcome.map_decoded[0] == best);
    }
  }

  TEST_CASE("noiseless bijective pipeline: MAP recovers everything") {
    SimConfig cfg = base_config(SourceModel::single(f2, {Rational(3, 4), Rational(1, 4)}),
                                MacModel::noiseless(f2));
    cfg.code_matrix = Matrix::identity(f2, 4);
    cfg.mode = DecoderMode::kBoth;
    const auto reports = run_simulation(cfg);
    CHECK(reports[0].map_errors == 0);
    // Typicality with zero candidates falls back deterministically and is
    // flagged; the bound still holds.
    CHECK(reports[0].ambiguous_count <= reports[0].trials);
  }

  TEST_CASE("map dominance on paired trials") {
    SimConfig cfg = base_config(SourceModel::doubly_symmetric_binary(Rational(1, 16)),
                                MacModel::binary_adder());
    cfg.n_list = {4, 6};
    cfg.trials = 1500;
    cfg.gamma_fixed = 0.2;
    cfg.mode = DecoderMode::kBoth;
    for (const SimulationReport& r : run_simulation(cfg)) {
      CHECK(r.map_errors <= r.typ_errors);
    }
  }

  TEST_CASE("simulated error never beats the threshold-decoding bound") {
    SimConfig cfg = base_config(SourceModel::doubly_symmetric_binary(Rational(1, 16)),
                                MacModel::binary_adder());
    cfg.n_list = {4, 6};
    cfg.trials = 2000;
    cfg.gamma_fixed = 0.2;
    cfg.bound_mode = BoundMode::kExact;
    for (const SimulationReport& r : run_simulation(cfg)) {
      const double sigma = std::sqrt(std::max(r.eps_hat * (1 - r.eps_hat), 1e-9) / r.trials);
      CHECK(r.eps_hat <= r.bound + 3.0 * sigma);
    }
  }

  TEST_CASE("condition-violating configuration keeps failing") {
    // Channel ignores terminal 2 and H(V2|V1) = h(1/8) = 0.377 nats > 0.2.
    SimConfig cfg = base_config(SourceModel::doubly_symmetric_binary(Rational(1, 8)),
                                MacModel::ignore_second_terminal(MacModel::noiseless(f2), f2));
    cfg.n_list = {4, 6};
    cfg.trials = 1000;
    cfg.gamma_c = 0.5;
    cfg.gamma_fixed.reset();
    cfg.mode = DecoderMode::kBoth;
    for (const SimulationReport& r : run_simulation(cfg)) {
      CHECK(r.eps_hat >= 0.3);
      // Even MAP cannot beat the per-letter guessing floor 1 - (7/8)^n.
      const double floor = 1.0 - std::pow(7.0 / 8.0, r.n);
      const double sigma = std::sqrt(0.25 / r.trials);
      CHECK(static_cast<double>(r.map_errors) / r.trials >= floor - 3.0 * sigma);
    }
  }

  TEST_CASE("identical seeds give byte-identical reports") {
    SimConfig cfg = base_config(SourceModel::doubly_symmetric_binary(Rational(1, 16)),
                                MacModel::binary_adder());
    cfg.trials = 300;
    cfg.mode = DecoderMode::kBoth;
    cfg.bound_mode = BoundMode::kExact;
    const std::string a = reports_to_csv(run_simulation(cfg), cfg.mode);
    const std::string b = reports_to_csv(run_simulation(cfg), cfg.mode);
    CHECK(a == b);
    cfg.seed = 8;
    const std::string c = reports_to_csv(run_simulation(cfg), cfg.mode);
    CHECK(a != c);
  }

  TEST_CASE("frozen vs fresh randomization both run and differ") {
    SimConfig cfg = base_config(SourceModel::single(f2, {Rational(3, 4), Rational(1, 4)}),
                                MacModel::bsc(Rational(1, 16)));
    cfg.trials = 400;
    cfg.mode = DecoderMode::kTypicality;
    cfg.randomization = RandomizationMode::kFreshPerTrial;
    const auto fresh = run_simulation(cfg);
    cfg.randomization = RandomizationMode::kFrozen;
    const auto frozen = run_simulation(cfg);
    CHECK(fresh[0].trials == frozen[0].trials);
  }

  TEST_CASE("config file parse and validation") {
    const std::string text =
        "# doubly symmetric source over the adder MAC\n"
        "terminals 2\n"
        "source_q 2 2\n"
        "source_p 0 0 15/32\n"
        "source_p 0 1 1/32\n"
        "source_p 1 0 1/32\n"
        "source_p 1 1 15/32\n"
        "mac_y 3\n"
        "mac_w 0 0 0 1\n"
        "mac_w 0 1 1 1\n"
        "mac_w 1 0 1 1\n"
        "mac_w 1 1 2 1\n"
        "code rlc 2\n"
        "n_list 4 6\n"
        "trials 50\n"
        "seed 3\n"
        "gamma 0.2\n"
        "decoder both\n"
        "randomization fresh\n"
        "bound exact\n";
    const SimConfig cfg = SimConfig::parse_text(text);
    CHECK(cfg.source.terminals() == 2);
    CHECK(cfg.mac.y_card() == 3);
    CHECK(cfg.n_list == std::vector<std::uint32_t>{4, 6});
    CHECK(cfg.gamma_for(4) == doctest::Approx(0.2));
    const auto reports = run_simulation(cfg);
    CHECK(reports.size() == 2);
    // Missing seed is an error: no silent nondeterminism.
    CHECK_THROWS_AS(SimConfig::parse_text("terminals 1\nsource_q 2\nsource_p 0 1/2\n"
                                          "source_p 1 1/2\nmac_y 2\nmac_w 0 0 1\nmac_w 1 1 1\n"
                                          "code rlc 2\nn_list 2\ntrials 5\n"),
                    ParseError);
    CHECK_THROWS_AS(SimConfig::parse_text("nonsense 1\n"), ParseError);
  }

  TEST_CASE("grid search finds the uniform input for symmetric channels") {
    const SourceModel src = SourceModel::single(f2, {Rational(1, 2), Rational(1, 2)});
    const GridSearchResult uni = grid_search_pmf(src, MacModel::noiseless(f2), 8);
    CHECK(uni.best[0].p[0][0] == Rational(1, 2));
    // Adder MAC with independent uniform inputs: I(X1 X2; Y) = 1.5 ln 2.
    const SourceModel dsbs = SourceModel::doubly_symmetric_binary(Rational(1, 16));
    const GridSearchResult adder = grid_search_pmf(dsbs, MacModel::binary_adder(), 4);
    const InfoQuantities at_uniform = single_letter_quantities(
        dsbs, {LetterPmf::uniform(f2, f2), LetterPmf::uniform(f2, f2)}, MacModel::binary_adder());
    CHECK(adder.quantities.min_margin >= at_uniform.min_margin - 1e-12);
    bool found_joint = false;
    for (const SubsetQuantities& s : adder.quantities.subsets) {
      if (s.mask == 3 && std::abs(s.i_cond - 1.5 * std::log(2.0)) < 1e-9) found_joint = true;
    }
    CHECK(found_joint);
    // Margins reported match a recomputation.
    const InfoQuantities again = single_letter_quantities(
        dsbs, adder.best, MacModel::binary_adder());
    CHECK(again.min_margin == doctest::Approx(adder.quantities.min_margin));
  }

  TEST_CASE("info density: closed forms and guards") {
    // K=1, noiseless identity channel, uniform encoder: i(x; y) = ln q
    // when y = x, undefined (guarded) otherwise.
    const SourceModel src = SourceModel::single(f2, {Rational(3, 4), Rational(1, 4)});
    const SystemLaw law(src, {LetterPmf::uniform(f2, f2)}, MacModel::noiseless(f2));
    const std::vector<Seq> v{Seq::parse(f2, "010")};
    const std::vector<std::vector<Symbol>> x{{0, 1, 0}};
    const InfoDensity match = info_density(law, 1, v, x, {0, 1, 0});
    CHECK(match.i_defined);
    CHECK(match.i == doctest::Approx(std::log(2.0)));
    // h(v) = (1/n) sum ln 1/P(v_t) for an unconditioned source.
    CHECK(match.h ==
          doctest::Approx((2 * std::log(4.0 / 3.0) + std::log(4.0)) / 3.0));
    const InfoDensity mismatch = info_density(law, 1, v, x, {1, 1, 0});
    CHECK_FALSE(mismatch.i_defined);
    // Deterministic source: h = 0.
    const SourceModel det = SourceModel::single(f2, {Rational(1), Rational(0)});
    const SystemLaw det_law(det, {LetterPmf::uniform(f2, f2)}, MacModel::noiseless(f2));
    const std::vector<Seq> v0{Seq::zeros(f2, 3)};
    const std::vector<std::vector<Symbol>> x0{{0, 0, 0}};
    CHECK(info_density(det_law, 1, v0, x0, {0, 0, 0}).h == doctest::Approx(0.0));
    // For a DSBS pair, h(v_1 | v_2) factorizes over letters.
    const SourceModel dsbs = SourceModel::doubly_symmetric_binary(Rational(1, 4));
    const std::vector<LetterPmf> pmfs(2, LetterPmf::uniform(f2, f2));
    const SystemLaw pair_law(dsbs, pmfs, MacModel::binary_adder());
    const std::vector<Seq> vv{Seq::parse(f2, "01"), Seq::parse(f2, "00")};
    const std::vector<std::vector<Symbol>> xx{{0, 0}, {0, 0}};
    const InfoDensity hd = info_density(pair_law, 1, vv, xx, {0, 0});
    CHECK(hd.h == doctest::Approx((std::log(4.0 / 3.0) + std::log(4.0)) / 2.0));
  }

  TEST_CASE("results are independent of the thread count") {
    SimConfig cfg = base_config(SourceModel::doubly_symmetric_binary(Rational(1, 16)),
                                MacModel::binary_adder());
    cfg.trials = 333;
    cfg.gamma_fixed = 0.2;
    cfg.mode = DecoderMode::kBoth;
    cfg.threads = 1;
    const std::string one = reports_to_csv(run_simulation(cfg), cfg.mode);
    cfg.threads = 3;
    const std::string three = reports_to_csv(run_simulation(cfg), cfg.mode);
    cfg.threads = 8;
    const std::string eight = reports_to_csv(run_simulation(cfg), cfg.mode);
    CHECK(one == three);
    CHECK(one == eight);
  }

  TEST_CASE("decoder budget guard") {
    const SourceModel src = SourceModel::doubly_symmetric_binary(Rational(1, 16));
    const std::vector<LetterPmf> pmfs(2, LetterPmf::uniform(f2, f2));
    const SystemLaw law(src, pmfs, MacModel::binary_adder());
    DecoderSpec spec;
    spec.gamma = 0.1;
    CHECK_THROWS_AS(JointDecoder(law, spec, 16, 1 << 10), BudgetError);
  }
}
