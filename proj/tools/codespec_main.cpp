// codespec: spectra, goodness certification, JSCC encoders, and
// end-to-end MAC simulation from the command line.

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "codespec/analysis.hpp"
#include "codespec/channel.hpp"
#include "codespec/verify.hpp"

namespace {

using namespace codespec;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailure = 1;
constexpr int kExitInputError = 2;
constexpr int kExitBudgetExceeded = 3;

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file: " + out_path);
  out << text;
}

struct EnsembleSpec {
  std::string matrix_path;
  std::vector<std::uint32_t> rlc;        // q n m
  std::vector<std::string> bernoulli;    // q n m density
};

CodeEnsemble make_ensemble(const EnsembleSpec& spec) {
  const int given = !spec.matrix_path.empty() + !spec.rlc.empty() + !spec.bernoulli.empty();
  if (given != 1) {
    throw ConfigError("give exactly one of --matrix, --rlc, --bernoulli");
  }
  if (!spec.matrix_path.empty()) {
    return CodeEnsemble::deterministic(LinearCode(Matrix::load_file(spec.matrix_path)));
  }
  if (!spec.rlc.empty()) {
    if (spec.rlc.size() != 3) throw ConfigError("--rlc needs q,n,m");
    return CodeEnsemble::random_linear(Alphabet(spec.rlc[0]), spec.rlc[1], spec.rlc[2]);
  }
  if (spec.bernoulli.size() != 4) throw ConfigError("--bernoulli needs q,n,m,density");
  return CodeEnsemble::bernoulli_sparse(
      Alphabet(static_cast<std::uint32_t>(std::stoul(spec.bernoulli[0]))),
      static_cast<std::uint32_t>(std::stoul(spec.bernoulli[1])),
      static_cast<std::uint32_t>(std::stoul(spec.bernoulli[2])),
      Rational::parse(spec.bernoulli[3]));
}

double display(double nats, bool bits) { return bits ? nats / std::log(2.0) : nats; }

std::string goodness_text(const GoodnessReport& report, GoodnessCriterion criterion, bool bits) {
  std::ostringstream out;
  const char* name = criterion == GoodnessCriterion::kKernel ? "kernel"
                     : criterion == GoodnessCriterion::kImage ? "image"
                                                            : "joint";
  out << "criterion," << name << '\n';
  out << "status," << (report.exact ? "exact" : "estimated") << '\n';
  if (report.vacuous) {
    out << "delta,vacuously-good\n";
    return out.str();
  }
  out << "delta," << format_g12(display(report.delta, bits)) << (bits ? " # bits" : " # nats")
      << '\n';
  out << "max_ratio," << report.max_ratio.to_string() << '\n';
  auto key_text = [](const TypeKey& key) {
    std::string s;
    for (std::size_t i = 0; i < key.size(); ++i) {
      if (i) s.push_back(' ');
      s += std::to_string(key[i]);
    }
    return s;
  };
  if (!report.arg_p.empty()) out << "argmax_p," << key_text(report.arg_p) << '\n';
  if (!report.arg_q.empty()) out << "argmax_q," << key_text(report.arg_q) << '\n';
  return out.str();
}

int run(int argc, char** argv) {
  CLI::App app{"code-spectrum toolkit: exact spectra of linear codes, goodness "
               "certification, JSCC encoders, and MAC simulation"};
  app.require_subcommand(1);
  std::string out_path;
  app.add_option("--out", out_path, "write the report to a file instead of stdout");
  std::uint32_t threads = 0;
  app.add_option("--threads", threads,
                 "worker threads for simulation trials (results are identical "
                 "for any thread count)");

  // spectrum
  auto* sp = app.add_subcommand("spectrum", "kernel/image/joint spectrum of a code");
  std::string sp_matrix, sp_which = "joint";
  std::uint64_t sp_budget = kDefaultBudget;
  sp->add_option("--matrix", sp_matrix, "generator matrix file")->required();
  sp->add_option("--which", sp_which, "kernel|image|joint")->required();
  sp->add_option("--budget", sp_budget, "enumeration budget");

  // alpha
  auto* al = app.add_subcommand("alpha", "alpha table of a code or ensemble");
  EnsembleSpec al_spec;
  std::string al_method = "auto";
  std::uint64_t al_budget = kDefaultBudget, al_samples = 0, al_seed = 0;
  al->add_option("--matrix", al_spec.matrix_path, "generator matrix file");
  al->add_option("--rlc", al_spec.rlc, "uniform random linear code q,n,m")->delimiter(',');
  al->add_option("--bernoulli", al_spec.bernoulli, "sparse ensemble q,n,m,density")
      ->delimiter(',');
  al->add_option("--method", al_method, "auto|enumerate|column-law");
  al->add_option("--samples", al_samples, "Monte Carlo sample count (with --seed)");
  al->add_option("--seed", al_seed, "Monte Carlo seed");
  al->add_option("--budget", al_budget, "enumeration budget");

  // goodness
  auto* go = app.add_subcommand("goodness", "goodness-criterion certification");
  EnsembleSpec go_spec;
  std::string go_criterion = "joint";
  std::uint64_t go_budget = kDefaultBudget;
  bool go_bits = false;
  go->add_option("--matrix", go_spec.matrix_path, "generator matrix file");
  go->add_option("--rlc", go_spec.rlc, "uniform random linear code q,n,m")->delimiter(',');
  go->add_option("--bernoulli", go_spec.bernoulli, "sparse ensemble q,n,m,density")
      ->delimiter(',');
  go->add_option("--criterion", go_criterion, "kernel|image|joint")->required();
  go->add_option("--budget", go_budget, "enumeration budget");
  go->add_flag("--bits", go_bits, "display in bits instead of nats");

  // quantizer
  auto* qz = app.add_subcommand("quantizer", "build a quantizer for a target pmf");
  std::string qz_target;
  std::uint32_t qz_l = 0, qz_qu = 0;
  std::uint64_t qz_budget = kDefaultBudget;
  qz->add_option("--target", qz_target, "target pmf file")->required();
  qz->add_option("--l", qz_l, "coded length (slots = qU^l)")->required();
  qz->add_option("--qu", qz_qu, "coded alphabet size (default: the target's qX)");
  qz->add_option("--budget", qz_budget, "enumeration budget");

  // encode
  auto* en = app.add_subcommand("encode", "encode a source word with a JSCC encoder");
  std::string en_matrix, en_target, en_input, en_save, en_encoder;
  std::uint64_t en_seed = 0;
  bool en_seed_given = false;
  en->add_option("--matrix", en_matrix, "generator matrix file");
  en->add_option("--target", en_target, "target pmf file")->required();
  en->add_option("--input", en_input, "source word (digit string)")->required();
  en->add_option("--seed", en_seed, "randomization seed")->each([&](const std::string&) {
    en_seed_given = true;
  });
  en->add_option("--save-encoder", en_save, "write the realized encoder instance");
  en->add_option("--encoder", en_encoder, "reuse a serialized encoder instance");

  // simulate
  auto* si = app.add_subcommand("simulate", "end-to-end Monte Carlo simulation");
  std::string si_config;
  si->add_option("--config", si_config, "simulation config file")->required();

  // analyze
  auto* an = app.add_subcommand("analyze", "structural analyses of codes and ensembles");
  std::string an_op, an_matrix, an_density = "1/4", an_positions;
  std::vector<std::uint32_t> an_nlist;
  std::uint32_t an_q = 2, an_n = 8, an_m = 16, an_lmult = 2, an_exact_limit = 4;
  std::uint64_t an_samples = 1000, an_seed = 1, an_budget = kDefaultBudget;
  double an_slack = 0.15, an_floor = 0.05, an_hx = 0.3, an_hy = 0.3, an_delta = 0.0,
         an_tolerance = 0.01;
  an->add_option("--op", an_op, "gv|density|sparse|distance|profile|systematic")->required();
  an->add_option("--matrix", an_matrix, "generator matrix file");
  an->add_option("--q", an_q, "alphabet size");
  an->add_option("--n", an_n, "input length");
  an->add_option("--m", an_m, "output length");
  an->add_option("--l-mult", an_lmult, "output length multiplier (distance op)");
  an->add_option("--n-list", an_nlist, "blocklength list")->delimiter(',');
  an->add_option("--samples", an_samples, "Monte Carlo samples");
  an->add_option("--seed", an_seed, "Monte Carlo seed");
  an->add_option("--slack", an_slack, "GV slack in nats");
  an->add_option("--floor", an_floor, "sparse delta floor in nats");
  an->add_option("--hx", an_hx, "input entropy threshold");
  an->add_option("--hy", an_hy, "output entropy threshold");
  an->add_option("--delta", an_delta, "goodness delta in the distance condition");
  an->add_option("--density", an_density, "Bernoulli density (rational)");
  an->add_option("--positions", an_positions, "systematic output positions, comma separated");
  an->add_option("--tolerance", an_tolerance, "rate tolerance (systematic op)");
  an->add_option("--exact-limit", an_exact_limit, "largest n computed exactly");
  an->add_option("--budget", an_budget, "enumeration budget");
  bool an_bits = false;
  an->add_flag("--bits", an_bits, "display entropy-valued columns in bits");

  // verify
  auto* ve = app.add_subcommand("verify", "run the proposition verification batteries");
  std::string ve_suite = "all";
  VerifyOptions ve_options;
  ve->add_option("--suite", ve_suite, "props|encoder|analysis|all");
  ve->add_option("--budget", ve_options.budget, "enumeration budget (0 skips everything)");
  ve->add_option("--seed", ve_options.seed, "seed for the statistical checks");
  ve->add_flag("--inject-alpha-fault", ve_options.inject_alpha_fault,
               "test hook: corrupt one alpha table to exercise the failure path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitInputError;
  }

  try {
    if (sp->parsed()) {
      const LinearCode code(Matrix::load_file(sp_matrix));
      std::string csv;
      if (sp_which == "kernel") csv = kernel_spectrum(code, sp_budget).to_csv();
      else if (sp_which == "image") csv = image_spectrum(code, sp_budget).to_csv();
      else if (sp_which == "joint") csv = joint_spectrum_exact(code, sp_budget).to_csv();
      else throw ConfigError("--which must be kernel|image|joint");
      emit(csv, out_path);
    } else if (al->parsed()) {
      const CodeEnsemble ens = make_ensemble(al_spec);
      const AlphaTable table = [&] {
        if (al_samples > 0) {
          Rng rng(al_seed);
          return alpha_table_mc(ens, al_samples, rng, al_budget);
        }
        SpectrumMethod method = SpectrumMethod::kAuto;
        if (al_method == "enumerate") method = SpectrumMethod::kEnumerate;
        else if (al_method == "column-law") method = SpectrumMethod::kColumnLaw;
        else if (al_method != "auto") throw ConfigError("--method must be auto|enumerate|column-law");
        return alpha_table(ens, method, al_budget);
      }();
      emit(table.to_csv(), out_path);
    } else if (go->parsed()) {
      const CodeEnsemble ens = make_ensemble(go_spec);
      GoodnessCriterion criterion;
      if (go_criterion == "kernel") criterion = GoodnessCriterion::kKernel;
      else if (go_criterion == "image") criterion = GoodnessCriterion::kImage;
      else if (go_criterion == "joint") criterion = GoodnessCriterion::kJoint;
      else throw ConfigError("--criterion must be kernel|image|joint");
      const GoodnessReport report = certify_goodness(ens, criterion, go_budget);
      emit(goodness_text(report, criterion, go_bits), out_path);
    } else if (qz->parsed()) {
      const ConditionalPmf target = ConditionalPmf::load_file(qz_target);
      const Alphabet qu(qz_qu == 0 ? target.x_alphabet().q() : qz_qu);
      const QuantizerBuild build = build_quantizer(target, qu, qz_l, qz_budget);
      std::ostringstream out;
      out << "l," << qz_l << '\n';
      out << "max_tv," << build.max_tv.to_string() << '\n';
      out << "starved," << (build.starved ? "yes" : "no") << '\n';
      out << "v,x,realized,target,abs_error\n";
      for (const QuantizerCellError& cell : build.cells) {
        out << (cell.v_label.empty() ? "-" : cell.v_label) << ',' << cell.x_label << ','
            << cell.realized.to_string() << ',' << cell.target.to_string() << ','
            << cell.abs_error.to_string() << '\n';
      }
      emit(out.str(), out_path);
    } else if (en->parsed()) {
      const ConditionalPmf target = ConditionalPmf::load_file(en_target);
      std::optional<RandomizedAffineCode> rc;
      if (!en_encoder.empty()) {
        std::ifstream in(en_encoder);
        if (!in) throw ConfigError("cannot open encoder file: " + en_encoder);
        std::ostringstream buf;
        buf << in.rdbuf();
        rc = RandomizedAffineCode::parse_text(buf.str());
      } else {
        if (en_matrix.empty()) throw ConfigError("encode needs --matrix or --encoder");
        if (!en_seed_given) throw ConfigError("encode needs --seed (no silent nondeterminism)");
        const LinearCode code(Matrix::load_file(en_matrix));
        Rng rng(en_seed);
        rc = RandomizedAffineCode::draw(code, rng);
      }
      const std::uint32_t l = rc->base().output_length();
      const ConditionalPmf scaled =
          target.kind() == ConditionalPmf::Kind::kPerSymbolMarginal
              ? ConditionalPmf::per_symbol_marginal(target.v_alphabet(),
                                                    rc->base().input_length(),
                                                    target.x_alphabet(),
                                                    rc->base().input_length(),
                                                    target.marginal_row())
              : target;
      const QuantizerBuild build = build_quantizer(scaled, rc->base().alphabet(), l);
      const JsccEncoder encoder(build.quantizer, *rc);
      const Seq v = Seq::parse(scaled.v_alphabet(), en_input);
      emit(encoder.encode(v).to_string() + "\n", out_path);
      if (!en_save.empty()) {
        std::ofstream save(en_save, std::ios::binary);
        if (!save) throw ConfigError("cannot open encoder output file: " + en_save);
        save << rc->to_text();
      }
    } else if (si->parsed()) {
      SimConfig config = SimConfig::load_file(si_config);
      if (threads > 0) config.threads = threads;
      const std::vector<SimulationReport> reports = run_simulation(config);
      emit(reports_to_csv(reports, config.mode), out_path);
    } else if (an->parsed()) {
      std::ostringstream out;
      if (an_op == "gv") {
        Rng rng(an_seed);
        const GvReport report =
            gv_check(Alphabet(an_q), an_n, an_m, an_samples, an_slack, rng, an_budget);
        out << "samples," << report.samples.size() << '\n';
        out << "degenerate," << report.degenerate << '\n';
        out << "pass_fraction," << format_g12(report.pass_fraction) << '\n';
        out << "verdict," << (report.pass_fraction >= 0.9 ? "gv-consistent" : "gv-violating")
            << '\n';
      } else if (an_op == "density") {
        if (an_matrix.empty()) throw ConfigError("--op density needs --matrix");
        const DensityReport report = matrix_density(Matrix::load_file(an_matrix));
        out << "density," << format_g12(report.density) << '\n';
        out << "threshold," << format_g12(report.threshold) << '\n';
        out << "verdict," << (report.sparse ? "sparse" : "dense") << '\n';
      } else if (an_op == "sparse") {
        if (an_nlist.empty()) throw ConfigError("--op sparse needs --n-list");
        Rng rng(an_seed);
        const SparseReport report =
            sparse_non_goodness_check(Alphabet(an_q), Rational::parse(an_density), an_nlist,
                                      an_floor, an_exact_limit, an_samples, rng, an_budget);
        out << "n,delta_exact,delta_mc,delta_mc_lower,unit_row_output_entropy,mc\n";
        for (const SparseRow& row : report.rows) {
          out << row.n << ',' << format_g12(display(row.delta_exact, an_bits)) << ','
              << format_g12(display(row.delta_mc, an_bits)) << ','
              << format_g12(display(row.delta_mc_lower, an_bits)) << ','
              << format_g12(display(row.unit_row_output_entropy, an_bits)) << ','
              << (row.mc_used ? "yes" : "no") << '\n';
        }
        out << "floor_met," << (report.floor_met ? "yes" : "no") << '\n';
        out << "no_significant_drop," << (report.no_significant_drop ? "yes" : "no") << '\n';
      } else if (an_op == "distance") {
        if (an_nlist.empty()) throw ConfigError("--op distance needs --n-list");
        Rng rng(an_seed);
        const DistanceReport report = distance_check(Alphabet(an_q), an_lmult, an_nlist, an_hx,
                                                     an_hy, an_delta, an_exact_limit, an_samples,
                                                     rng, an_budget);
        if (!report.condition_met) {
          out << "condition_met,no\nverdict,no-claim\n";
        } else {
          out << "condition_met,yes\n";
          out << "n,m,expected_b,std_error,proof_bound,exact\n";
          for (const DistanceRow& row : report.rows) {
            out << row.n << ',' << row.m << ',' << format_g12(row.expected_b) << ','
                << format_g12(row.std_error) << ',' << format_g12(row.proof_bound) << ','
                << (row.exact ? "yes" : "no") << '\n';
          }
          out << "non_increasing," << (report.non_increasing ? "yes" : "no") << '\n';
          out << "within_bound," << (report.within_bound ? "yes" : "no") << '\n';
        }
      } else if (an_op == "profile") {
        if (an_matrix.empty()) throw ConfigError("--op profile needs --matrix");
        const EntropyProfile profile =
            min_entropy_profile(LinearCode(Matrix::load_file(an_matrix)), an_budget);
        out << "min_combined," << format_g12(display(profile.min_combined, an_bits)) << '\n';
        out << "argmin_index," << profile.argmin_index << '\n';
        out << "min_output_entropy," << format_g12(display(profile.min_output_entropy, an_bits))
            << '\n';
        out << "normalized_distance," << format_g12(profile.normalized_distance) << '\n';
      } else if (an_op == "systematic") {
        if (an_matrix.empty() || an_positions.empty()) {
          throw ConfigError("--op systematic needs --matrix and --positions");
        }
        std::vector<std::uint32_t> positions;
        std::istringstream pos_in(an_positions);
        std::string tok;
        while (std::getline(pos_in, tok, ',')) {
          positions.push_back(static_cast<std::uint32_t>(std::stoul(tok)));
        }
        const SystematicReport report = systematic_rate_check(
            LinearCode(Matrix::load_file(an_matrix)), positions, an_tolerance, an_budget);
        if (!report.systematic) out << "verdict,not-systematic\n";
        else if (report.boundary) out << "verdict,boundary-no-claim\n";
        else {
          out << "rate," << format_g12(report.rate) << '\n';
          out << "delta_n," << format_g12(display(report.delta_n, an_bits)) << '\n';
          out << "verdict,"
              << (report.rate_bound_consistent ? "rate-bound-consistent" : "rate-bound-violated")
              << '\n';
        }
      } else {
        throw ConfigError("unknown --op: " + an_op);
      }
      emit(out.str(), out_path);
    } else if (ve->parsed()) {
      const std::vector<VerifyCheck> checks = verify_suite(ve_suite, ve_options);
      std::ostringstream out;
      std::uint64_t skipped = 0;
      for (const VerifyCheck& c : checks) {
        const char* status = c.status == VerifyCheck::Status::kPass   ? "PASS"
                             : c.status == VerifyCheck::Status::kFail ? "FAIL"
                                                                      : "SKIP";
        if (c.status == VerifyCheck::Status::kSkip) ++skipped;
        out << c.name << ',' << (c.exact ? "exact" : "mc") << ',' << status << ',' << c.detail
            << '\n';
      }
      if (skipped == checks.size() && !checks.empty()) {
        out << "# warning: every check was skipped (budget too small)\n";
      }
      emit(out.str(), out_path);
      return verify_all_passed(checks) ? kExitOk : kExitVerifyFailure;
    }
  } catch (const BudgetError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBudgetExceeded;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInputError;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
