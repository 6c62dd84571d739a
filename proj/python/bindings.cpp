// Python bindings for the main codespec operations. Exact rationals cross
// the boundary as fractions.Fraction built from decimal strings, so no
// precision is lost.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "codespec/analysis.hpp"
#include "codespec/channel.hpp"
#include "codespec/verify.hpp"

namespace py = pybind11;
using namespace codespec;

namespace {

py::object to_py_int(const BigInt& v) {
  return py::reinterpret_steal<py::object>(
      PyLong_FromString(v.to_string().c_str(), nullptr, 10));
}

py::object to_fraction(const Rational& r) {
  static py::object fraction = py::module_::import("fractions").attr("Fraction");
  return fraction(to_py_int(r.num()), to_py_int(r.den()));
}

CodeEnsemble ensemble_from(const std::string& matrix_text, const py::object& rlc,
                           const py::object& bernoulli) {
  const int given = !matrix_text.empty() + !rlc.is_none() + !bernoulli.is_none();
  if (given != 1) throw ConfigError("give exactly one of matrix_text, rlc, bernoulli");
  if (!matrix_text.empty()) {
    return CodeEnsemble::deterministic(LinearCode(Matrix::parse_text(matrix_text)));
  }
  if (!rlc.is_none()) {
    const auto [q, n, m] = rlc.cast<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>>();
    return CodeEnsemble::random_linear(Alphabet(q), n, m);
  }
  const auto [q, n, m, density] =
      bernoulli.cast<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t, std::string>>();
  return CodeEnsemble::bernoulli_sparse(Alphabet(q), n, m, Rational::parse(density));
}

py::list spectrum_rows(const Spectrum& s) {
  py::list rows;
  for (const auto& [key, mass] : s.cells()) {
    rows.append(py::make_tuple(py::cast(key), to_fraction(mass)));
  }
  return rows;
}

py::list joint_rows(const JointSpectrum& s) {
  py::list rows;
  for (const auto& [key, mass] : s.cells()) {
    rows.append(py::make_tuple(py::cast(key.first), py::cast(key.second), to_fraction(mass)));
  }
  return rows;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "code-spectrum toolkit: exact spectra of linear codes, goodness "
            "certification, JSCC encoders, and MAC simulation";

  py::register_exception<BudgetError>(m, "BudgetError");
  py::register_exception<ParseError>(m, "ParseError");

  m.def(
      "ambient_spectrum",
      [](std::uint32_t q, std::uint32_t n) {
        return spectrum_rows(ambient_spectrum(n, Alphabet(q)));
      },
      py::arg("q"), py::arg("n"),
      "Type distribution of the full ambient space X^n as (counts, Fraction) rows.");

  m.def(
      "spectrum",
      [](const std::string& matrix_text, const std::string& which, std::uint64_t budget) {
        const LinearCode code(Matrix::parse_text(matrix_text));
        if (which == "kernel") return py::object(spectrum_rows(kernel_spectrum(code, budget)));
        if (which == "image") return py::object(spectrum_rows(image_spectrum(code, budget)));
        if (which == "joint") return py::object(joint_rows(joint_spectrum_exact(code, budget)));
        throw ConfigError("which must be kernel|image|joint");
      },
      py::arg("matrix_text"), py::arg("which") = "joint", py::arg("budget") = kDefaultBudget,
      "Kernel, image, or joint spectrum of a generator matrix given in the "
      "'q n m' text format.");

  m.def(
      "alpha_table",
      [](const std::string& matrix_text, const py::object& rlc, const py::object& bernoulli,
         const std::string& method, std::uint64_t budget) {
        SpectrumMethod sm = SpectrumMethod::kAuto;
        if (method == "enumerate") sm = SpectrumMethod::kEnumerate;
        else if (method == "column-law") sm = SpectrumMethod::kColumnLaw;
        else if (method != "auto") throw ConfigError("method must be auto|enumerate|column-law");
        const AlphaTable table = alpha_table(ensemble_from(matrix_text, rlc, bernoulli), sm,
                                             budget);
        py::list rows;
        for (const auto& [key, value] : table.values) {
          rows.append(py::make_tuple(py::cast(key.first), py::cast(key.second),
                                     to_fraction(value)));
        }
        return rows;
      },
      py::arg("matrix_text") = "", py::arg("rlc") = py::none(),
      py::arg("bernoulli") = py::none(), py::arg("method") = "auto",
      py::arg("budget") = kDefaultBudget,
      "Exact alpha table of a code or ensemble as (P, Q, Fraction) rows.");

  m.def(
      "goodness",
      [](const std::string& matrix_text, const py::object& rlc, const py::object& bernoulli,
         const std::string& criterion, std::uint64_t budget) {
        GoodnessCriterion c;
        if (criterion == "kernel") c = GoodnessCriterion::kKernel;
        else if (criterion == "image") c = GoodnessCriterion::kImage;
        else if (criterion == "joint") c = GoodnessCriterion::kJoint;
        else throw ConfigError("criterion must be kernel|image|joint");
        const GoodnessReport report =
            certify_goodness(ensemble_from(matrix_text, rlc, bernoulli), c, budget);
        py::dict out;
        out["criterion"] = criterion;
        out["exact"] = report.exact;
        out["vacuous"] = report.vacuous;
        if (!report.vacuous) {
          out["delta"] = report.delta;
          out["max_ratio"] = to_fraction(report.max_ratio);
          out["argmax_p"] = report.arg_p;
          out["argmax_q"] = report.arg_q;
        }
        return out;
      },
      py::arg("matrix_text") = "", py::arg("rlc") = py::none(),
      py::arg("bernoulli") = py::none(), py::arg("criterion") = "joint",
      py::arg("budget") = kDefaultBudget,
      "goodness-criterion report: delta in nats with the argmax type pair.");

  m.def(
      "build_quantizer",
      [](const std::string& target_text, std::uint32_t l) {
        const ConditionalPmf target = ConditionalPmf::parse_text(target_text);
        const QuantizerBuild build = build_quantizer(target, target.x_alphabet(), l);
        py::dict out;
        out["max_tv"] = to_fraction(build.max_tv);
        out["starved"] = build.starved;
        py::list cells;
        for (const QuantizerCellError& cell : build.cells) {
          py::dict c;
          c["v"] = cell.v_label;
          c["x"] = cell.x_label;
          c["realized"] = to_fraction(cell.realized);
          c["target"] = to_fraction(cell.target);
          cells.append(c);
        }
        out["cells"] = cells;
        return out;
      },
      py::arg("target_text"), py::arg("l"),
      "Largest-remainder quantizer build report for a target pmf file text.");

  m.def(
      "encode",
      [](const std::string& matrix_text, const std::string& target_text, std::uint64_t seed,
         const std::string& input) {
        const LinearCode code(Matrix::parse_text(matrix_text));
        const ConditionalPmf target = ConditionalPmf::parse_text(target_text);
        const ConditionalPmf scaled =
            target.kind() == ConditionalPmf::Kind::kPerSymbolMarginal
                ? ConditionalPmf::per_symbol_marginal(target.v_alphabet(), code.input_length(),
                                                      target.x_alphabet(), code.input_length(),
                                                      target.marginal_row())
                : target;
        const QuantizerBuild build =
            build_quantizer(scaled, code.alphabet(), code.output_length());
        Rng rng(seed);
        const JsccEncoder encoder = JsccEncoder::draw(code, build.quantizer, rng);
        return encoder.encode(Seq::parse(scaled.v_alphabet(), input)).to_string();
      },
      py::arg("matrix_text"), py::arg("target_text"), py::arg("seed"), py::arg("input"),
      "Encode one source word with a freshly drawn interleaved coset encoder.");

  m.def(
      "simulate",
      [](const std::string& config_text, const std::string& base_dir) {
        const SimConfig config = SimConfig::parse_text(config_text, base_dir);
        py::list out;
        for (const SimulationReport& r : run_simulation(config)) {
          py::dict row;
          row["n"] = r.n;
          row["trials"] = r.trials;
          row["errors"] = r.typ_errors;
          row["eps_hat"] = r.eps_hat;
          row["map_errors"] = r.map_errors;
          row["ambiguous"] = r.ambiguous_count;
          row["subset_failures"] = r.subset_fail_counts;
          if (!std::isnan(r.bound)) row["bound"] = r.bound;
          row["seed"] = r.seed;
          row["gamma"] = r.gamma;
          out.append(row);
        }
        return out;
      },
      py::arg("config_text"), py::arg("base_dir") = ".",
      "Run the end-to-end Monte Carlo simulation for a config file text.");

  m.def(
      "gv_check",
      [](std::uint32_t q, std::uint32_t n, std::uint32_t m, std::uint64_t samples, double slack,
         std::uint64_t seed) {
        Rng rng(seed);
        const GvReport report = gv_check(Alphabet(q), n, m, samples, slack, rng);
        py::dict out;
        out["pass_fraction"] = report.pass_fraction;
        out["degenerate"] = report.degenerate;
        return out;
      },
      py::arg("q"), py::arg("n"), py::arg("m"), py::arg("samples"), py::arg("slack"),
      py::arg("seed"), "Gilbert-Varshamov check over sampled random linear codes.");

  m.def(
      "min_entropy_profile",
      [](const std::string& matrix_text) {
        const EntropyProfile p = min_entropy_profile(LinearCode(Matrix::parse_text(matrix_text)));
        py::dict out;
        out["min_combined"] = p.min_combined;
        out["min_output_entropy"] = p.min_output_entropy;
        out["normalized_distance"] = p.normalized_distance;
        return out;
      },
      py::arg("matrix_text"), "Entropy-based distance profile of a code.");

  m.def(
      "verify",
      [](const std::string& suite, std::uint64_t budget, std::uint64_t seed) {
        VerifyOptions options;
        options.budget = budget;
        options.seed = seed;
        py::list out;
        for (const VerifyCheck& c : verify_suite(suite, options)) {
          py::dict row;
          row["name"] = c.name;
          row["exact"] = c.exact;
          row["status"] = c.status == VerifyCheck::Status::kPass   ? "pass"
                          : c.status == VerifyCheck::Status::kFail ? "fail"
                                                                   : "skip";
          row["detail"] = c.detail;
          out.append(row);
        }
        return out;
      },
      py::arg("suite") = "all", py::arg("budget") = kDefaultBudget, py::arg("seed") = 1,
      "Run a verification battery and return one record per check.");
}
