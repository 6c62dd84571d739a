#include "codespec/analysis.hpp"

#include <algorithm>
#include <cmath>

namespace codespec {

double entropy(const TypeVector& p) {
  double h = 0.0;
  const double n = static_cast<double>(p.n());
  for (std::uint32_t c : p.counts()) {
    if (c == 0) continue;
    const double f = c / n;
    h -= f * std::log(f);
  }
  return h;
}

double binary_entropy(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return -x * std::log(x) - (1.0 - x) * std::log(1.0 - x);
}

std::uint64_t b_set_size(const LinearCode& code, double h_x, double h_y, std::uint64_t budget) {
  std::uint64_t count = 0;
  for (const auto& [x, y] : code.graph(budget)) {
    if (x.is_zero()) continue;
    if (entropy(type_of(x)) <= h_x && entropy(type_of(y)) <= h_y) ++count;
  }
  return count;
}

Rational expected_b_size(const CodeEnsemble& ensemble, double h_x, double h_y,
                         std::uint64_t budget) {
  const Alphabet alpha = ensemble.alphabet();
  const std::uint32_t n = ensemble.input_length();
  const std::uint32_t m = ensemble.output_length();
  Rational total(0);
  if (ensemble.iid_entries()) {
    // E|B| = sum over qualifying input types of |T_P| Pr{output in the
    // qualifying low-entropy output set}, via the column symbol law.
    for (const TypeVector& p : all_types(alpha, n)) {
      if (p.is_zero_type() || entropy(p) > h_x) continue;
      const std::vector<Rational> mu = column_symbol_law(ensemble, p);
      Rational out_mass(0);
      for (const TypeVector& qt : all_types(alpha, m)) {
        if (entropy(qt) > h_y) continue;
        Rational prob(BigInt::multinomial(m, qt.counts()), BigInt(1));
        bool zero = false;
        for (std::uint32_t u = 0; u < alpha.q(); ++u) {
          const std::uint32_t c = qt.counts()[u];
          if (c == 0) continue;
          if (mu[u].is_zero()) {
            zero = true;
            break;
          }
          prob *= Rational::pow(mu[u], c);
        }
        if (!zero) out_mass += prob;
      }
      total += Rational(type_class_size(p), BigInt(1)) * out_mass;
    }
    return total;
  }
  for (const auto& [code, w] : ensemble.enumerate(budget)) {
    if (w.is_zero()) continue;
    total += w * Rational(BigInt::from_uint64(b_set_size(code, h_x, h_y, budget)), BigInt(1));
  }
  return total;
}

McEstimate b_size_mc(const CodeEnsemble& ensemble, double h_x, double h_y, std::uint64_t samples,
                     Rng& rng, std::uint64_t budget) {
  if (samples == 0) throw DomainError("b_size_mc: zero samples");
  double sum = 0.0, sum_sq = 0.0;
  for (std::uint64_t s = 0; s < samples; ++s) {
    Rng child = rng.split(s);
    const LinearCode code = ensemble.sample(child);
    const double b = static_cast<double>(b_set_size(code, h_x, h_y, budget));
    sum += b;
    sum_sq += b * b;
  }
  McEstimate est;
  est.samples = samples;
  est.mean = sum / samples;
  const double var = std::max(0.0, sum_sq / samples - est.mean * est.mean);
  est.std_error = std::sqrt(var / samples);
  return est;
}

DistanceReport distance_check(Alphabet alphabet, std::uint32_t l_multiplier,
                              const std::vector<std::uint32_t>& n_list, double h_x, double h_y,
                              double delta, std::uint32_t exact_limit, std::uint64_t mc_samples,
                              Rng& rng, std::uint64_t budget) {
  DistanceReport report;
  report.h_x = h_x;
  report.h_y = h_y;
  report.delta = delta;
  const double q = alphabet.q();
  const double rate = 1.0 / l_multiplier;
  report.condition_met = (h_x + delta) * rate + h_y < std::log(q);
  if (!report.condition_met) return report;

  for (std::size_t i = 0; i < n_list.size(); ++i) {
    const std::uint32_t n = n_list[i];
    const std::uint32_t m = n * l_multiplier;
    const CodeEnsemble rlc = CodeEnsemble::random_linear(alphabet, n, m);
    DistanceRow row;
    row.n = n;
    row.m = m;
    // Finite-n form of the proof's bound: the type-counting slacks
    // (n+1)^|X| (m+1)^|Y| are kept explicit.
    row.proof_bound = std::pow(n + 1.0, q) * std::pow(m + 1.0, q) *
                      std::exp(n * delta + n * h_x + m * h_y - m * std::log(q));
    if (n <= exact_limit) {
      row.expected_b = expected_b_size(rlc, h_x, h_y, budget).to_double();
      row.exact = true;
    } else {
      Rng child = rng.split(i);
      const McEstimate est = b_size_mc(rlc, h_x, h_y, mc_samples, child, budget);
      row.expected_b = est.mean;
      row.std_error = est.std_error;
      row.exact = false;
    }
    report.rows.push_back(row);
  }
  report.non_increasing = true;
  report.within_bound = true;
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const DistanceRow& r = report.rows[i];
    if (r.expected_b > r.proof_bound + 3.0 * r.std_error) report.within_bound = false;
    if (i > 0) {
      const DistanceRow& prev = report.rows[i - 1];
      const double slack = 3.0 * (prev.std_error + r.std_error);
      if (r.expected_b > prev.expected_b + slack) report.non_increasing = false;
    }
  }
  return report;
}

EntropyProfile min_entropy_profile(const LinearCode& code, std::uint64_t budget) {
  EntropyProfile profile;
  const double rate = code.rate().to_double();
  bool first = true;
  std::uint64_t index = 0;
  for (const auto& [x, y] : code.graph(budget)) {
    ++index;
    if (x.is_zero()) continue;
    const TypeVector py = type_of(y);
    const double hx = entropy(type_of(x));
    const double hy = entropy(py);
    const double combined = hx * rate + hy;
    const double zero_fraction =
        static_cast<double>(py.counts()[0]) / static_cast<double>(py.n());
    if (first || combined < profile.min_combined) {
      profile.min_combined = combined;
      profile.argmin_index = index - 1;
    }
    if (first || hy < profile.min_output_entropy) profile.min_output_entropy = hy;
    if (first || zero_fraction > profile.max_zero_fraction) {
      profile.max_zero_fraction = zero_fraction;
    }
    first = false;
  }
  if (first) throw DomainError("min_entropy_profile: code has no nonzero inputs");
  profile.normalized_distance = 1.0 - profile.max_zero_fraction;
  return profile;
}

GvSample gv_single(const LinearCode& code, double slack, std::uint64_t budget) {
  const EntropyProfile profile = min_entropy_profile(code, budget);
  const double q = code.alphabet().q();
  const double rate = code.rate().to_double();
  GvSample sample;
  sample.distance = profile.normalized_distance;
  sample.lhs = binary_entropy(sample.distance) + sample.distance * std::log(q - 1.0);
  sample.rhs = (1.0 - rate) * std::log(q) - slack;
  if (sample.rhs <= 0.0 || sample.distance >= 1.0) {
    sample.verdict = GvVerdict::kDegenerate;
  } else {
    sample.verdict = sample.lhs >= sample.rhs ? GvVerdict::kPass : GvVerdict::kFail;
  }
  return sample;
}

GvReport gv_check(Alphabet alphabet, std::uint32_t n, std::uint32_t m, std::uint64_t samples,
                  double slack, Rng& rng, std::uint64_t budget) {
  GvReport report;
  std::uint64_t pass = 0, considered = 0;
  for (std::uint64_t s = 0; s < samples; ++s) {
    Rng child = rng.split(s);
    const LinearCode code(random_matrix(n, m, alphabet, child));
    const GvSample sample = gv_single(code, slack, budget);
    if (sample.verdict == GvVerdict::kDegenerate) {
      ++report.degenerate;
    } else {
      ++considered;
      if (sample.verdict == GvVerdict::kPass) ++pass;
    }
    report.samples.push_back(sample);
  }
  report.pass_fraction =
      considered == 0 ? 0.0 : static_cast<double>(pass) / static_cast<double>(considered);
  return report;
}

DensityReport matrix_density(const Matrix& a) {
  std::uint64_t nonzero = 0;
  for (Symbol e : a.entries()) {
    if (e != 0) ++nonzero;
  }
  DensityReport report;
  report.density = static_cast<double>(nonzero) / static_cast<double>(a.entries().size());
  report.threshold = 1.0 - 1.0 / a.alphabet().q();
  report.sparse = report.density < report.threshold;
  return report;
}

SparseReport sparse_non_goodness_check(Alphabet alphabet, const Rational& density,
                                       const std::vector<std::uint32_t>& n_list,
                                       double floor_value, std::uint32_t exact_limit,
                                       std::uint64_t mc_samples, Rng& rng, std::uint64_t budget) {
  SparseReport report;
  report.density = density.to_double();
  report.floor_met = true;
  report.no_significant_drop = true;

  for (std::size_t i = 0; i < n_list.size(); ++i) {
    const std::uint32_t n = n_list[i];
    const CodeEnsemble ens = CodeEnsemble::bernoulli_sparse(alphabet, n, n, density);
    SparseRow row;
    row.n = n;

    // Exact goodness via the column law, with the argmax cell retained.
    const GoodnessReport exact = goodness_delta(ens, SpectrumMethod::kColumnLaw, budget);
    row.delta_exact = exact.delta;

    // Unit-weight input row: expected output-type entropy.
    std::vector<std::uint32_t> unit_counts(alphabet.q(), 0);
    unit_counts[0] = n - 1;
    unit_counts[1] = 1;
    const TypeVector unit(alphabet, n, unit_counts);
    const std::vector<Rational> mu = column_symbol_law(ens, unit);
    double ent = 0.0;
    for (const TypeVector& qt : all_types(alphabet, n)) {
      Rational prob(BigInt::multinomial(n, qt.counts()), BigInt(1));
      bool zero = false;
      for (std::uint32_t u = 0; u < alphabet.q(); ++u) {
        const std::uint32_t c = qt.counts()[u];
        if (c == 0) continue;
        if (mu[u].is_zero()) {
          zero = true;
          break;
        }
        prob *= Rational::pow(mu[u], c);
      }
      if (!zero) ent += prob.to_double() * entropy(qt);
    }
    row.unit_row_output_entropy = ent;

    if (n > exact_limit) {
      // Spec-mandated MC estimate at larger n: sample codes, estimate the
      // expected joint-spectrum mass at the exact argmax cell, and lower-
      // bound delta at 3 sigma.
      row.mc_used = true;
      const TypeVector arg_p(alphabet, n, exact.arg_p);
      const TypeVector arg_q(alphabet, n, exact.arg_q);
      const Rational ambient =
          Rational(type_class_size(arg_p) * type_class_size(arg_q),
                   BigInt::pow(BigInt(alphabet.q()), n) * BigInt::pow(BigInt(alphabet.q()), n));
      const std::uint64_t domain = sat_pow(alphabet.q(), n);
      check_budget(domain, budget, "sparse_non_goodness_check samples");
      double sum = 0.0, sum_sq = 0.0;
      Rng mc_rng = rng.split(i);
      for (std::uint64_t s = 0; s < mc_samples; ++s) {
        Rng child = mc_rng.split(s);
        const LinearCode code = ens.sample(child);
        std::uint64_t hits = 0;
        for (std::uint64_t xi = 0; xi < domain; ++xi) {
          const Seq x = Seq::from_index(alphabet, n, xi);
          if (type_of(x).counts() != arg_p.counts()) continue;
          if (type_of(code.encode(x)).counts() == arg_q.counts()) ++hits;
        }
        const double v = static_cast<double>(hits) / static_cast<double>(domain);
        sum += v;
        sum_sq += v * v;
      }
      const double mean = sum / mc_samples;
      const double var = std::max(0.0, sum_sq / mc_samples - mean * mean);
      const double se = std::sqrt(var / mc_samples);
      const double amb = ambient.to_double();
      row.delta_mc = std::log(mean / amb) / n;
      row.delta_mc_lower = std::log(std::max(1e-300, (mean - 3.0 * se)) / amb) / n;
    } else {
      row.delta_mc = row.delta_exact;
      row.delta_mc_lower = row.delta_exact;
    }
    report.rows.push_back(row);
  }

  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    if (report.rows[i].delta_mc_lower < floor_value) report.floor_met = false;
    if (i > 0) {
      // No significant decrease at 3 sigma: the lower bound at the larger n
      // must not fall below the smaller n's lower bound beyond MC noise.
      const double prev = report.rows[i - 1].delta_mc_lower;
      const double cur_upper =
          report.rows[i].mc_used
              ? report.rows[i].delta_mc + (report.rows[i].delta_mc - report.rows[i].delta_mc_lower)
              : report.rows[i].delta_mc;
      if (cur_upper < prev) report.no_significant_drop = false;
    }
  }
  return report;
}

SystematicReport systematic_rate_check(const LinearCode& code,
                                       const std::vector<std::uint32_t>& positions,
                                       double tolerance, std::uint64_t budget) {
  const std::uint32_t n = code.input_length();
  const std::uint32_t m = code.output_length();
  if (positions.size() != n) {
    throw ConfigError("systematic_rate_check: need one output position per input symbol");
  }
  SystematicReport report;
  // Validate that column positions[i] is the i-th unit vector.
  report.systematic = true;
  for (std::uint32_t i = 0; i < n && report.systematic; ++i) {
    if (positions[i] >= m) throw ConfigError("systematic_rate_check: position out of range");
    for (std::uint32_t r = 0; r < n; ++r) {
      const Symbol want = r == i ? 1 : 0;
      if (code.generator().at(r, positions[i]) != want) {
        report.systematic = false;
        break;
      }
    }
  }
  if (!report.systematic) return report;

  const double q = code.alphabet().q();
  report.rate = code.rate().to_double();
  if (report.rate <= 1.0 / q + tolerance) {
    report.boundary = true;
    return report;
  }

  // Proof construction: inputs a^n for nonzero a; their joint-spectrum
  // ratio lower-bounds max alpha.
  const JointSpectrum ambient =
      ambient_joint_spectrum(n, code.alphabet(), m, code.alphabet());
  const Rational in_mass(BigInt(1), BigInt::pow(BigInt(code.alphabet().q()), n));
  Rational best(0);
  for (std::uint32_t a = 1; a < code.alphabet().q(); ++a) {
    const Seq x(code.alphabet(), std::vector<Symbol>(n, static_cast<Symbol>(a)));
    const Seq y = code.encode(x);
    const Rational ratio = in_mass / ambient.at(type_of(x), type_of(y));
    if (ratio > best) best = ratio;
  }
  (void)budget;
  report.delta_n = std::log(best.to_double()) / n;
  report.rate_bound_consistent = report.delta_n > 0.0;
  return report;
}

}  // namespace codespec
