#include "codespec/codes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

namespace codespec {

LinearCode::LinearCode(Matrix generator) : generator_(std::move(generator)) {}

std::vector<std::pair<Seq, Seq>> LinearCode::graph(std::uint64_t budget) const {
  const std::uint64_t domain = sat_pow(alphabet().q(), input_length());
  check_budget(domain, budget, "LinearCode::graph");
  std::vector<std::pair<Seq, Seq>> g;
  g.reserve(domain);
  for (std::uint64_t i = 0; i < domain; ++i) {
    Seq x = Seq::from_index(alphabet(), input_length(), i);
    Seq y = encode(x);
    g.emplace_back(std::move(x), std::move(y));
  }
  return g;
}

Spectrum kernel_spectrum(const LinearCode& code, std::uint64_t budget) {
  std::vector<Seq> kernel;
  for (auto& [x, y] : code.graph(budget)) {
    if (y.is_zero()) kernel.push_back(x);
  }
  return set_spectrum(kernel);  // kernel always holds 0^n
}

Spectrum image_spectrum(const LinearCode& code, std::uint64_t budget) {
  std::set<std::vector<Symbol>> image;
  for (auto& [x, y] : code.graph(budget)) image.insert(y.symbols());
  std::vector<Seq> distinct;
  distinct.reserve(image.size());
  for (auto& sym : image) distinct.emplace_back(code.alphabet(), sym);
  return set_spectrum(distinct);
}

JointSpectrum joint_spectrum_exact(const LinearCode& code, std::uint64_t budget) {
  return relation_joint_spectrum(code.graph(budget));
}

RandomizedAffineCode::RandomizedAffineCode(LinearCode base, Perm outer, Perm inner, Seq offset)
    : base_(std::move(base)), outer_(std::move(outer)), inner_(std::move(inner)),
      offset_(std::move(offset)) {
  if (outer_.size() != base_.input_length() || inner_.size() != base_.output_length() ||
      offset_.size() != base_.output_length() || offset_.alphabet() != base_.alphabet()) {
    throw DimensionError("RandomizedAffineCode: component shapes do not match the base code");
  }
}

RandomizedAffineCode RandomizedAffineCode::draw(LinearCode base, Rng& rng) {
  Perm outer = random_perm(base.input_length(), rng);
  Perm inner = random_perm(base.output_length(), rng);
  Seq offset = random_uniform_seq(base.output_length(), base.alphabet(), rng);
  return RandomizedAffineCode(std::move(base), std::move(outer), std::move(inner),
                              std::move(offset));
}

RandomizedAffineCode RandomizedAffineCode::trivial(LinearCode base) {
  const std::uint32_t n = base.input_length();
  const std::uint32_t m = base.output_length();
  Seq zero = Seq::zeros(base.alphabet(), m);
  return RandomizedAffineCode(std::move(base), Perm::identity(n), Perm::identity(m),
                              std::move(zero));
}

Seq RandomizedAffineCode::evaluate(const Seq& x) const {
  return inner_.apply(base_.encode(outer_.apply(x))) + offset_;
}

std::string RandomizedAffineCode::to_text() const {
  std::ostringstream out;
  out << base_.generator().to_text();
  for (std::size_t i = 0; i < outer_.size(); ++i) out << (i ? " " : "") << outer_.image_of(i) + 1;
  out << '\n';
  for (std::size_t i = 0; i < inner_.size(); ++i) out << (i ? " " : "") << inner_.image_of(i) + 1;
  out << '\n';
  for (std::size_t i = 0; i < offset_.size(); ++i) {
    out << (i ? " " : "") << static_cast<unsigned>(offset_[i]);
  }
  out << '\n';
  return out.str();
}

RandomizedAffineCode RandomizedAffineCode::parse_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string header;
  if (!std::getline(in, header)) throw ParseError("encoder: missing header", 1);
  std::istringstream head(header);
  long long q = 0, n = 0, m = 0;
  if (!(head >> q >> n >> m)) throw ParseError("encoder: bad matrix header", 1);
  std::ostringstream matrix_text;
  matrix_text << header << '\n';
  std::string line;
  for (long long r = 0; r < n; ++r) {
    if (!std::getline(in, line)) throw ParseError("encoder: missing matrix row", static_cast<std::size_t>(r + 2));
    matrix_text << line << '\n';
  }
  Matrix gen = Matrix::parse_text(matrix_text.str());
  auto read_ints = [&](std::size_t count, std::size_t line_no) {
    if (!std::getline(in, line)) throw ParseError("encoder: missing line", line_no);
    std::istringstream row(line);
    std::vector<long long> vals;
    long long v;
    while (row >> v) vals.push_back(v);
    if (vals.size() != count) throw ParseError("encoder: wrong count", line_no);
    return vals;
  };
  const std::size_t base_lines = static_cast<std::size_t>(n) + 1;
  auto outer_vals = read_ints(static_cast<std::size_t>(n), base_lines + 1);
  auto inner_vals = read_ints(static_cast<std::size_t>(m), base_lines + 2);
  auto offset_vals = read_ints(static_cast<std::size_t>(m), base_lines + 3);
  auto to_perm = [](const std::vector<long long>& vals, std::size_t line_no) {
    std::vector<std::uint32_t> img;
    img.reserve(vals.size());
    for (long long v : vals) {
      if (v < 1 || v > static_cast<long long>(vals.size())) {
        throw ParseError("encoder: permutation image out of range", line_no);
      }
      img.push_back(static_cast<std::uint32_t>(v - 1));
    }
    return Perm(std::move(img));
  };
  std::vector<Symbol> offset_syms;
  for (long long v : offset_vals) {
    if (v < 0 || v >= q) throw ParseError("encoder: offset symbol out of range", base_lines + 3);
    offset_syms.push_back(static_cast<Symbol>(v));
  }
  Seq offset(gen.alphabet(), std::move(offset_syms));
  return RandomizedAffineCode(LinearCode(std::move(gen)), to_perm(outer_vals, base_lines + 1),
                              to_perm(inner_vals, base_lines + 2), std::move(offset));
}

CodeEnsemble CodeEnsemble::deterministic(LinearCode code) {
  CodeEnsemble e(Kind::kDeterministic, code.alphabet(), code.input_length(), code.output_length());
  e.members_.emplace_back(std::move(code), Rational(1));
  return e;
}

CodeEnsemble CodeEnsemble::explicit_list(std::vector<std::pair<LinearCode, Rational>> members) {
  if (members.empty()) throw DomainError("CodeEnsemble: empty member list");
  Rational total(0);
  for (const auto& [code, w] : members) {
    if (code.alphabet() != members.front().first.alphabet() ||
        code.input_length() != members.front().first.input_length() ||
        code.output_length() != members.front().first.output_length()) {
      throw DimensionError("CodeEnsemble: members must share dimensions");
    }
    if (w.sign() < 0) throw DomainError("CodeEnsemble: negative weight");
    total += w;
  }
  if (total != Rational(1)) throw DomainError("CodeEnsemble: weights must sum to 1");
  CodeEnsemble e(Kind::kExplicitList, members.front().first.alphabet(),
                 members.front().first.input_length(), members.front().first.output_length());
  e.members_ = std::move(members);
  return e;
}

CodeEnsemble CodeEnsemble::random_linear(Alphabet alphabet, std::uint32_t n, std::uint32_t m) {
  return CodeEnsemble(Kind::kRandomLinear, alphabet, n, m);
}

CodeEnsemble CodeEnsemble::bernoulli_sparse(Alphabet alphabet, std::uint32_t n, std::uint32_t m,
                                            Rational density) {
  if (density.sign() < 0 || density > Rational(1)) {
    throw DomainError("CodeEnsemble: density must lie in [0, 1]");
  }
  CodeEnsemble e(Kind::kBernoulliSparse, alphabet, n, m);
  e.density_ = std::move(density);
  return e;
}

LinearCode CodeEnsemble::sample(Rng& rng) const {
  switch (kind_) {
    case Kind::kDeterministic:
      return members_.front().first;
    case Kind::kExplicitList: {
      // Exact inverse-CDF draw over the common denominator.
      BigInt denom(1);
      for (const auto& [code, w] : members_) denom = denom * w.den();
      if (!denom.fits_uint64()) throw DomainError("CodeEnsemble::sample: weights too fine");
      const std::uint64_t d = denom.to_uint64();
      std::uint64_t r = rng.below(d);
      for (const auto& [code, w] : members_) {
        const std::uint64_t share = (w.num() * (BigInt::from_uint64(d) / w.den())).to_uint64();
        if (r < share) return code;
        r -= share;
      }
      return members_.back().first;
    }
    case Kind::kRandomLinear:
      return LinearCode(random_matrix(n_, m_, alphabet_, rng));
    case Kind::kBernoulliSparse: {
      const std::uint64_t den = density_.den().to_uint64();
      const std::uint64_t num = density_.num().to_uint64();
      std::vector<Symbol> entries(static_cast<std::size_t>(n_) * m_, 0);
      for (Symbol& e : entries) {
        if (rng.below(den) < num) {
          e = static_cast<Symbol>(1 + rng.below(alphabet_.q() - 1));
        }
      }
      return LinearCode(Matrix(alphabet_, n_, m_, std::move(entries)));
    }
  }
  throw DomainError("CodeEnsemble::sample: bad kind");
}

std::vector<Rational> CodeEnsemble::entry_law() const {
  if (!iid_entries()) throw DomainError("CodeEnsemble::entry_law: not an iid-entry ensemble");
  const std::uint32_t q = alphabet_.q();
  std::vector<Rational> law(q);
  if (kind_ == Kind::kRandomLinear) {
    for (std::uint32_t u = 0; u < q; ++u) law[u] = Rational(1, q);
  } else {
    law[0] = Rational(1) - density_;
    for (std::uint32_t u = 1; u < q; ++u) law[u] = density_ / Rational(q - 1);
  }
  return law;
}

std::uint64_t CodeEnsemble::enumeration_size() const {
  switch (kind_) {
    case Kind::kDeterministic:
    case Kind::kExplicitList:
      return members_.size();
    default:
      return sat_pow(alphabet_.q(), n_ * m_);
  }
}

std::vector<std::pair<LinearCode, Rational>> CodeEnsemble::enumerate(std::uint64_t budget) const {
  if (kind_ == Kind::kDeterministic || kind_ == Kind::kExplicitList) return members_;
  const std::uint64_t count = enumeration_size();
  check_budget(count, budget, "CodeEnsemble::enumerate");
  std::vector<std::pair<LinearCode, Rational>> out;
  out.reserve(count);
  const std::vector<Rational> law = entry_law();
  for (std::uint64_t idx = 0; idx < count; ++idx) {
    Matrix g = Matrix::from_index(alphabet_, n_, m_, idx);
    Rational w(1);
    for (Symbol e : g.entries()) w *= law[e];
    out.emplace_back(LinearCode(std::move(g)), std::move(w));
  }
  return out;
}

namespace {

JointSpectrum weighted_mean_spectrum(const std::vector<std::pair<LinearCode, Rational>>& members,
                                     std::uint64_t budget) {
  const LinearCode& first = members.front().first;
  JointSpectrum acc(first.alphabet(), first.input_length(), first.alphabet(),
                    first.output_length());
  for (const auto& [code, w] : members) {
    if (w.is_zero()) continue;
    const JointSpectrum js = joint_spectrum_exact(code, budget);
    for (const auto& [key, mass] : js.cells()) {
      acc.add(TypeVector(code.alphabet(), code.input_length(), key.first),
              TypeVector(code.alphabet(), code.output_length(), key.second), mass * w);
    }
  }
  return acc;
}

}  // namespace

std::vector<Rational> column_symbol_law(const CodeEnsemble& ensemble, const TypeVector& p) {
  const std::uint32_t q = ensemble.alphabet().q();
  const std::vector<Rational> entry = ensemble.entry_law();
  // Law of sum_i x_i E_i over one column: delta_0 convolved per nonzero
  // input symbol with the law of a * entry.
  std::vector<Rational> law(q, Rational(0));
  law[0] = Rational(1);
  for (std::uint32_t a = 1; a < q; ++a) {
    std::vector<Rational> scaled(q, Rational(0));
    for (std::uint32_t u = 0; u < q; ++u) {
      scaled[(a * u) % q] += entry[u];
    }
    for (std::uint32_t rep = 0; rep < p.counts()[a]; ++rep) {
      std::vector<Rational> next(q, Rational(0));
      for (std::uint32_t w = 0; w < q; ++w) {
        if (law[w].is_zero()) continue;
        for (std::uint32_t u = 0; u < q; ++u) {
          if (scaled[u].is_zero()) continue;
          next[(w + u) % q] += law[w] * scaled[u];
        }
      }
      law = std::move(next);
    }
  }
  return law;
}

ExpectedSpectrum expected_joint_spectrum(const CodeEnsemble& ensemble, SpectrumMethod method,
                                         std::uint64_t budget) {
  const Alphabet alpha = ensemble.alphabet();
  const std::uint32_t n = ensemble.input_length();
  const std::uint32_t m = ensemble.output_length();

  if (method == SpectrumMethod::kAuto) {
    const bool enumerable = ensemble.enumeration_size() <= budget &&
                            sat_pow(alpha.q(), n) <= budget;
    method = enumerable ? SpectrumMethod::kEnumerate
                        : (ensemble.iid_entries() ? SpectrumMethod::kColumnLaw
                                                  : SpectrumMethod::kEnumerate);
  }

  ExpectedSpectrum result{JointSpectrum(alpha, n, alpha, m)};
  if (method == SpectrumMethod::kEnumerate) {
    result.spectrum = weighted_mean_spectrum(ensemble.enumerate(budget), budget);
    return result;
  }

  // Column law: generator columns are iid, so conditioned on the input
  // type P the output is an iid string with symbol law mu_P;
  // E[S](P, Q) = |T_P| C(m, mQ) prod_u mu_P(u)^{mQ(u)} / q^n.
  const BigInt qn = BigInt::pow(BigInt(alpha.q()), n);
  for (const TypeVector& p : all_types(alpha, n)) {
    const std::vector<Rational> mu = column_symbol_law(ensemble, p);
    const Rational in_mass(type_class_size(p), qn);
    for (const TypeVector& qt : all_types(alpha, m)) {
      Rational prob(BigInt::multinomial(m, qt.counts()), BigInt(1));
      bool zero = false;
      for (std::uint32_t u = 0; u < alpha.q() && !zero; ++u) {
        const std::uint32_t c = qt.counts()[u];
        if (c == 0) continue;
        if (mu[u].is_zero()) {
          zero = true;
          break;
        }
        prob *= Rational::pow(mu[u], c);
      }
      if (zero || prob.is_zero()) continue;
      result.spectrum.add(p, qt, in_mass * prob);
    }
  }
  return result;
}

ExpectedSpectrum joint_spectrum_mc(const CodeEnsemble& ensemble, std::uint64_t samples, Rng& rng,
                                   std::uint64_t budget) {
  if (samples == 0) throw DomainError("joint_spectrum_mc: zero samples");
  const Alphabet alpha = ensemble.alphabet();
  const std::uint32_t n = ensemble.input_length();
  const std::uint32_t m = ensemble.output_length();
  const std::uint64_t domain = sat_pow(alpha.q(), n);
  const bool sample_inputs = domain > budget;

  ExpectedSpectrum result{JointSpectrum(alpha, n, alpha, m)};
  result.exact = false;
  result.samples = samples;
  result.input_sampled = sample_inputs;

  std::map<JointKey, std::uint64_t> tally;
  std::uint64_t total = 0;
  for (std::uint64_t s = 0; s < samples; ++s) {
    Rng child = rng.split(s);
    const LinearCode code = ensemble.sample(child);
    if (sample_inputs) {
      const Seq x = random_uniform_seq(n, alpha, child);
      ++tally[JointKey{type_of(x).counts(), type_of(code.encode(x)).counts()}];
      ++total;
    } else {
      for (std::uint64_t i = 0; i < domain; ++i) {
        const Seq x = Seq::from_index(alpha, n, i);
        ++tally[JointKey{type_of(x).counts(), type_of(code.encode(x)).counts()}];
        ++total;
      }
    }
  }
  for (const auto& [key, count] : tally) {
    result.spectrum.add(TypeVector(alpha, n, key.first), TypeVector(alpha, m, key.second),
                        Rational(BigInt::from_uint64(count), BigInt::from_uint64(total)));
  }
  return result;
}

Rational AlphaTable::at(const TypeVector& p, const TypeVector& q) const {
  if (p.n() != n || q.n() != m || p.alphabet() != in_alphabet || q.alphabet() != out_alphabet) {
    throw DomainError("AlphaTable::at: type outside the table's ambient space");
  }
  auto it = values.find(JointKey{p.counts(), q.counts()});
  return it == values.end() ? Rational(0) : it->second;
}

std::string AlphaTable::to_csv() const {
  std::ostringstream out;
  out << "# " << (exact ? "exact" : "estimated") << ",samples=" << samples << '\n';
  for (std::uint32_t a = 0; a < in_alphabet.q(); ++a) out << 'p' << a << ',';
  for (std::uint32_t a = 0; a < out_alphabet.q(); ++a) out << 'q' << a << ',';
  out << "num,den\n";
  for (const auto& [key, value] : values) {
    for (std::uint32_t c : key.first) out << c << ',';
    for (std::uint32_t c : key.second) out << c << ',';
    out << value.num().to_string() << ',' << value.den().to_string() << '\n';
  }
  return out.str();
}

namespace {

AlphaTable alpha_from_expected(const CodeEnsemble& ensemble, const ExpectedSpectrum& expected) {
  AlphaTable table{ensemble.alphabet(), ensemble.alphabet(), ensemble.input_length(),
                   ensemble.output_length()};
  table.exact = expected.exact;
  table.samples = expected.samples;
  const Alphabet alpha = ensemble.alphabet();
  const BigInt qn = BigInt::pow(BigInt(alpha.q()), table.n);
  const BigInt qm = BigInt::pow(BigInt(alpha.q()), table.m);
  for (const auto& [key, mass] : expected.spectrum.cells()) {
    const TypeVector p(alpha, table.n, key.first);
    const TypeVector q(alpha, table.m, key.second);
    const Rational ambient(type_class_size(p) * type_class_size(q), qn * qm);
    table.values.emplace(key, mass / ambient);
  }
  return table;
}

GoodnessReport goodness_from_alpha(const AlphaTable& table, std::uint32_t scale_len) {
  GoodnessReport report;
  report.exact = table.exact;
  report.samples = table.samples;
  report.vacuous = true;
  const TypeKey zero_key = TypeVector::zero_type(table.in_alphabet, table.n).counts();
  for (const auto& [key, value] : table.values) {
    if (key.first == zero_key) continue;  // P != P_{0^n}
    if (report.vacuous || value > report.max_ratio) {
      report.vacuous = false;
      report.max_ratio = value;
      report.arg_p = key.first;
      report.arg_q = key.second;
    }
  }
  if (report.vacuous) {
    report.delta = -std::numeric_limits<double>::infinity();
    return report;
  }
  report.delta = std::log(report.max_ratio.to_double()) / scale_len;
  return report;
}

}  // namespace

AlphaTable alpha_table(const CodeEnsemble& ensemble, SpectrumMethod method, std::uint64_t budget) {
  return alpha_from_expected(ensemble, expected_joint_spectrum(ensemble, method, budget));
}

AlphaTable alpha_table_mc(const CodeEnsemble& ensemble, std::uint64_t samples, Rng& rng,
                          std::uint64_t budget) {
  return alpha_from_expected(ensemble, joint_spectrum_mc(ensemble, samples, rng, budget));
}

Rational alpha(const CodeEnsemble& ensemble, const TypeVector& p, const TypeVector& q,
               SpectrumMethod method, std::uint64_t budget) {
  return alpha_table(ensemble, method, budget).at(p, q);
}

GoodnessReport goodness_delta(const CodeEnsemble& ensemble, SpectrumMethod method,
                              std::uint64_t budget) {
  return goodness_from_alpha(alpha_table(ensemble, method, budget), ensemble.input_length());
}

GoodnessReport goodness_delta_mc(const CodeEnsemble& ensemble, std::uint64_t samples, Rng& rng,
                                 std::uint64_t budget) {
  return goodness_from_alpha(alpha_table_mc(ensemble, samples, rng, budget),
                             ensemble.input_length());
}

GoodnessReport certify_goodness(const CodeEnsemble& ensemble, GoodnessCriterion criterion,
                                std::uint64_t budget) {
  if (criterion == GoodnessCriterion::kJoint) return goodness_delta(ensemble, SpectrumMethod::kAuto, budget);

  const Alphabet alpha = ensemble.alphabet();
  const std::uint32_t n = ensemble.input_length();
  const std::uint32_t m = ensemble.output_length();
  const bool kernel = criterion == GoodnessCriterion::kKernel;
  const std::uint32_t len = kernel ? n : m;

  // E[S(ker F)] or E[S(F(X^n))] over the members.
  Spectrum mean(alpha, len);
  for (const auto& [code, w] : ensemble.enumerate(budget)) {
    if (w.is_zero()) continue;
    const Spectrum s = kernel ? kernel_spectrum(code, budget) : image_spectrum(code, budget);
    for (const auto& [key, mass] : s.cells()) {
      mean.add(TypeVector(alpha, len, key), mass * w);
    }
  }

  GoodnessReport report;
  report.vacuous = true;
  const Spectrum ambient = ambient_spectrum(len, alpha);
  const TypeKey zero_key = TypeVector::zero_type(alpha, len).counts();
  for (const auto& [key, mass] : mean.cells()) {
    if (key == zero_key) continue;
    const Rational ratio = mass / ambient.at(TypeVector(alpha, len, key));
    if (report.vacuous || ratio > report.max_ratio) {
      report.vacuous = false;
      report.max_ratio = ratio;
      if (kernel) report.arg_p = key;
      else report.arg_q = key;
    }
  }
  if (report.vacuous) {
    report.delta = -std::numeric_limits<double>::infinity();
    return report;
  }
  report.delta = std::log(report.max_ratio.to_double()) / len;
  return report;
}

RandomizedAffineCode randomize(const LinearCode& code, Rng& rng) {
  return RandomizedAffineCode::draw(code, rng);
}

PairwiseIndependenceReport verify_pairwise_independence(const CodeEnsemble& ensemble,
                                                        std::uint64_t budget) {
  const Alphabet alpha = ensemble.alphabet();
  const std::uint32_t q = alpha.q();
  const std::uint32_t n = ensemble.input_length();
  const std::uint32_t m = ensemble.output_length();
  const std::uint64_t domain = sat_pow(q, n);
  const std::uint64_t range = sat_pow(q, m);
  const std::uint64_t perms_n = factorial_u64(n);
  const std::uint64_t perms_m = factorial_u64(m);

  const auto members = ensemble.enumerate(budget);
  check_budget(members.size() * perms_n * perms_m * range, budget, "verify_pairwise_independence");
  check_budget(domain * range, budget, "verify_pairwise_independence state space");

  // Integer member weights over a common denominator keep every tally exact.
  BigInt common_den(1);
  for (const auto& [code, w] : members) {
    if (w.den() > common_den) common_den = w.den();
  }
  for (const auto& [code, w] : members) {
    if (!(common_den % w.den()).is_zero()) common_den = common_den * w.den();
  }
  std::vector<std::uint64_t> weight(members.size());
  for (std::size_t i = 0; i < members.size(); ++i) {
    weight[i] = (members[i].second.num() * (common_den / members[i].second.den())).to_uint64();
  }

  // Index tables: permutations acting on sequence ranks, offsets as maps.
  std::vector<Seq> inputs, outputs;
  for (std::uint64_t i = 0; i < domain; ++i) inputs.push_back(Seq::from_index(alpha, n, i));
  for (std::uint64_t i = 0; i < range; ++i) outputs.push_back(Seq::from_index(alpha, m, i));
  const auto sigmas_in = all_perms(n, budget);
  const auto sigmas_out = all_perms(m, budget);
  std::vector<std::vector<std::uint32_t>> in_tab(sigmas_in.size(),
                                                 std::vector<std::uint32_t>(domain));
  for (std::size_t s = 0; s < sigmas_in.size(); ++s) {
    for (std::uint64_t i = 0; i < domain; ++i) {
      in_tab[s][i] = static_cast<std::uint32_t>(sigmas_in[s].apply(inputs[i]).to_index());
    }
  }
  std::vector<std::vector<std::uint32_t>> out_tab(sigmas_out.size(),
                                                  std::vector<std::uint32_t>(range));
  for (std::size_t s = 0; s < sigmas_out.size(); ++s) {
    for (std::uint64_t i = 0; i < range; ++i) {
      out_tab[s][i] = static_cast<std::uint32_t>(sigmas_out[s].apply(outputs[i]).to_index());
    }
  }
  std::vector<std::vector<std::uint32_t>> add_tab(range, std::vector<std::uint32_t>(range));
  for (std::uint64_t c = 0; c < range; ++c) {
    for (std::uint64_t y = 0; y < range; ++y) {
      add_tab[c][y] = static_cast<std::uint32_t>((outputs[y] + outputs[c]).to_index());
    }
  }

  std::vector<std::uint64_t> singles(domain * range, 0);
  std::vector<std::uint64_t> pairs(domain * range * domain * range, 0);
  std::vector<std::uint32_t> enc(domain), fhat(domain);
  std::uint64_t randomizations = 0;

  for (std::size_t mi = 0; mi < members.size(); ++mi) {
    const LinearCode& code = members[mi].first;
    if (weight[mi] == 0) continue;
    for (std::uint64_t i = 0; i < domain; ++i) {
      enc[i] = static_cast<std::uint32_t>(code.encode(inputs[i]).to_index());
    }
    for (std::size_t si = 0; si < sigmas_in.size(); ++si) {
      for (std::size_t so = 0; so < sigmas_out.size(); ++so) {
        for (std::uint64_t c = 0; c < range; ++c) {
          ++randomizations;
          const std::uint64_t w = weight[mi];
          for (std::uint64_t x = 0; x < domain; ++x) {
            fhat[x] = add_tab[c][out_tab[so][enc[in_tab[si][x]]]];
          }
          for (std::uint64_t x = 0; x < domain; ++x) {
            singles[x * range + fhat[x]] += w;
            const std::uint64_t base = (x * range + fhat[x]) * domain * range;
            for (std::uint64_t xh = 0; xh < domain; ++xh) {
              if (xh == x) continue;
              pairs[base + xh * range + fhat[xh]] += w;
            }
          }
        }
      }
    }
  }

  const BigInt total = common_den * BigInt::from_uint64(perms_n * perms_m * range);
  const AlphaTable alpha_exact = alpha_table(ensemble, SpectrumMethod::kEnumerate, budget);

  PairwiseIndependenceReport report;
  report.randomizations = randomizations;
  report.uniform_marginal_ok = true;
  report.conditional_ok = true;
  report.max_defect = Rational(0);
  const Rational inv_qm(BigInt(1), BigInt::pow(BigInt(q), m));

  std::vector<TypeVector> in_types, out_types;
  for (const Seq& x : inputs) in_types.push_back(type_of(x));
  for (const Seq& y : outputs) out_types.push_back(type_of(y));

  for (std::uint64_t x = 0; x < domain; ++x) {
    for (std::uint64_t y = 0; y < range; ++y) {
      const Rational lhs(BigInt::from_uint64(singles[x * range + y]), total);
      const Rational defect = (lhs - inv_qm).abs();
      if (!defect.is_zero()) report.uniform_marginal_ok = false;
      if (defect > report.max_defect) report.max_defect = defect;
    }
  }
  for (std::uint64_t x = 0; x < domain; ++x) {
    for (std::uint64_t y = 0; y < range; ++y) {
      const std::uint64_t cond_count = singles[x * range + y];
      if (cond_count == 0) continue;
      const std::uint64_t base = (x * range + y) * domain * range;
      for (std::uint64_t xh = 0; xh < domain; ++xh) {
        if (xh == x) continue;
        const TypeVector diff_x = type_of(inputs[xh] - inputs[x]);
        for (std::uint64_t yh = 0; yh < range; ++yh) {
          const Rational lhs(BigInt::from_uint64(pairs[base + xh * range + yh]),
                             BigInt::from_uint64(cond_count));
          const TypeVector diff_y = type_of(outputs[yh] - outputs[y]);
          const Rational rhs = inv_qm * alpha_exact.at(diff_x, diff_y);
          const Rational defect = (lhs - rhs).abs();
          if (!defect.is_zero()) report.conditional_ok = false;
          if (defect > report.max_defect) report.max_defect = defect;
        }
      }
    }
  }
  return report;
}

CertifiedSample sample_certified_code(const CodeEnsemble& ensemble, double c1, double c2, Rng& rng,
                                      std::uint32_t max_tries, std::uint64_t budget) {
  const std::uint32_t q = ensemble.alphabet().q();
  if (c1 <= q || c2 <= q) {
    throw DomainError("sample_certified_code: constants must exceed the alphabet sizes");
  }
  const std::uint32_t n = ensemble.input_length();
  const std::uint32_t m = ensemble.output_length();
  const double threshold = std::pow(n + 1.0, c1) * std::pow(m + 1.0, c2);
  const JointSpectrum ambient = ambient_joint_spectrum(n, ensemble.alphabet(), m,
                                                       ensemble.alphabet());

  std::optional<CertifiedSample> best;
  for (std::uint32_t attempt = 0; attempt < max_tries; ++attempt) {
    Rng child = rng.split(attempt);
    LinearCode code = ensemble.sample(child);
    const JointSpectrum js = joint_spectrum_exact(code, budget);
    Rational max_ratio(0);
    const TypeKey zero_key = TypeVector::zero_type(ensemble.alphabet(), n).counts();
    for (const auto& [key, mass] : js.cells()) {
      if (key.first == zero_key) continue;
      const Rational ratio =
          mass / ambient.at(TypeVector(ensemble.alphabet(), n, key.first),
                            TypeVector(ensemble.alphabet(), m, key.second));
      if (ratio > max_ratio) max_ratio = ratio;
    }
    CertifiedSample sample{std::move(code), attempt + 1, max_ratio, threshold};
    if (max_ratio.to_double() < threshold) return sample;
    if (!best || sample.ratio < best->ratio) best = std::move(sample);
  }
  throw SearchError("sample_certified_code: no certified sample in " + std::to_string(max_tries) +
                    " tries; best ratio " + best->ratio.to_string());
}

}  // namespace codespec
