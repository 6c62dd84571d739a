#include "codespec/channel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <thread>
#include <tuple>

namespace codespec {

namespace {

constexpr double kNegInf = -1e300;

// Exact threshold sampler over a small rational pmf: common denominator
// D, cumulative integer thresholds, one below(D) draw per sample.
struct ExactSampler {
  std::uint64_t den = 0;
  std::vector<std::uint64_t> cum;

  void build(const std::vector<Rational>& pmf) {
    BigInt d(1);
    for (const Rational& p : pmf) {
      if (!(d % p.den()).is_zero()) d = d * p.den();
    }
    if (!d.fits_uint64() || d.to_uint64() > (std::uint64_t{1} << 62)) {
      throw ConfigError("pmf denominators too fine for exact sampling");
    }
    den = d.to_uint64();
    std::uint64_t acc = 0;
    cum.clear();
    for (const Rational& p : pmf) {
      acc += (p.num() * (d / p.den())).to_uint64();
      cum.push_back(acc);
    }
  }

  std::uint32_t draw(Rng& rng) const {
    const std::uint64_t r = rng.below(den);
    for (std::uint32_t i = 0;; ++i) {
      if (r < cum[i]) return i;
    }
  }
};

double log_rational(const Rational& r) {
  if (r.is_zero()) return kNegInf;
  return std::log(r.to_double());
}

}  // namespace

SourceModel::SourceModel(std::vector<Alphabet> alphabets, std::vector<Rational> joint_pmf)
    : alphabets_(std::move(alphabets)), joint_(std::move(joint_pmf)) {
  if (alphabets_.empty()) throw DimensionError("SourceModel: need at least one terminal");
  std::uint64_t card = 1;
  for (const Alphabet& a : alphabets_) card *= a.q();
  if (joint_.size() != card) throw DimensionError("SourceModel: pmf size != product of alphabets");
  Rational total(0);
  for (const Rational& p : joint_) {
    if (p.sign() < 0) throw DomainError("SourceModel: negative probability");
    total += p;
  }
  if (total != Rational(1)) throw DomainError("SourceModel: pmf must sum to 1 exactly");
  strides_.assign(alphabets_.size(), 1);
  for (std::size_t i = alphabets_.size(); i-- > 1;) {
    strides_[i - 1] = strides_[i] * alphabets_[i].q();
  }
  ExactSampler sampler;
  sampler.build(joint_);
  sample_den_ = sampler.den;
  sample_cum_ = std::move(sampler.cum);
}

SourceModel SourceModel::single(Alphabet alphabet, std::vector<Rational> pmf) {
  return SourceModel(std::vector<Alphabet>{alphabet}, std::move(pmf));
}

SourceModel SourceModel::doubly_symmetric_binary(const Rational& crossover) {
  const Rational half(1, 2);
  const Rational agree = (Rational(1) - crossover) * half;
  const Rational flip = crossover * half;
  return SourceModel({Alphabet(2), Alphabet(2)}, {agree, flip, flip, agree});
}

std::uint64_t SourceModel::tuple_index(const std::vector<Symbol>& letters) const {
  std::uint64_t idx = 0;
  for (std::size_t i = 0; i < alphabets_.size(); ++i) idx += letters[i] * strides_[i];
  return idx;
}

std::uint64_t SourceModel::sample_letter(Rng& rng) const {
  const std::uint64_t r = rng.below(sample_den_);
  for (std::uint64_t i = 0;; ++i) {
    if (r < sample_cum_[i]) return i;
  }
}

std::vector<Seq> SourceModel::sample(std::size_t n, Rng& rng) const {
  std::vector<std::vector<Symbol>> out(alphabets_.size(), std::vector<Symbol>(n));
  for (std::size_t t = 0; t < n; ++t) {
    std::uint64_t tuple = sample_letter(rng);
    for (std::size_t i = 0; i < alphabets_.size(); ++i) {
      out[i][t] = static_cast<Symbol>(tuple / strides_[i]);
      tuple %= strides_[i];
    }
  }
  std::vector<Seq> seqs;
  seqs.reserve(alphabets_.size());
  for (std::size_t i = 0; i < alphabets_.size(); ++i) {
    seqs.emplace_back(alphabets_[i], std::move(out[i]));
  }
  return seqs;
}

MacModel::MacModel(std::vector<Alphabet> input_alphabets, std::uint32_t y_card,
                   std::vector<Rational> transition)
    : inputs_(std::move(input_alphabets)), y_card_(y_card), w_(std::move(transition)) {
  if (inputs_.empty()) throw DimensionError("MacModel: need at least one input terminal");
  if (y_card_ < 1) throw DimensionError("MacModel: output alphabet must be nonempty");
  x_card_ = 1;
  for (const Alphabet& a : inputs_) x_card_ *= a.q();
  if (w_.size() != x_card_ * y_card_) throw DimensionError("MacModel: transition size mismatch");
  strides_.assign(inputs_.size(), 1);
  for (std::size_t i = inputs_.size(); i-- > 1;) strides_[i - 1] = strides_[i] * inputs_[i].q();
  row_den_.resize(x_card_);
  row_cum_.resize(x_card_);
  for (std::uint64_t xt = 0; xt < x_card_; ++xt) {
    Rational total(0);
    std::vector<Rational> row(y_card_);
    for (std::uint32_t y = 0; y < y_card_; ++y) {
      row[y] = w_[xt * y_card_ + y];
      if (row[y].sign() < 0) throw DomainError("MacModel: negative probability");
      total += row[y];
    }
    if (total != Rational(1)) throw DomainError("MacModel: each W(.|x) row must sum to 1");
    ExactSampler sampler;
    sampler.build(row);
    row_den_[xt] = sampler.den;
    row_cum_[xt] = std::move(sampler.cum);
  }
}

MacModel MacModel::noiseless(Alphabet alphabet) {
  const std::uint32_t q = alphabet.q();
  std::vector<Rational> w(static_cast<std::size_t>(q) * q, Rational(0));
  for (std::uint32_t x = 0; x < q; ++x) w[x * q + x] = Rational(1);
  return MacModel({alphabet}, q, std::move(w));
}

MacModel MacModel::bsc(const Rational& flip) {
  const Rational keep = Rational(1) - flip;
  return MacModel({Alphabet(2)}, 2, {keep, flip, flip, keep});
}

MacModel MacModel::binary_adder() {
  std::vector<Rational> w(4 * 3, Rational(0));
  for (std::uint32_t x1 = 0; x1 < 2; ++x1) {
    for (std::uint32_t x2 = 0; x2 < 2; ++x2) {
      w[(x1 * 2 + x2) * 3 + (x1 + x2)] = Rational(1);
    }
  }
  return MacModel({Alphabet(2), Alphabet(2)}, 3, std::move(w));
}

MacModel MacModel::ignore_second_terminal(const MacModel& base_k1, Alphabet x2_alphabet) {
  if (base_k1.terminals() != 1) throw DimensionError("ignore_second_terminal: base must be K=1");
  const std::uint32_t q1 = base_k1.input_alphabets()[0].q();
  const std::uint32_t q2 = x2_alphabet.q();
  const std::uint32_t yc = base_k1.y_card();
  std::vector<Rational> w(static_cast<std::size_t>(q1) * q2 * yc);
  for (std::uint32_t x1 = 0; x1 < q1; ++x1) {
    for (std::uint32_t x2 = 0; x2 < q2; ++x2) {
      for (std::uint32_t y = 0; y < yc; ++y) {
        w[(static_cast<std::size_t>(x1) * q2 + x2) * yc + y] = base_k1.prob(x1, y);
      }
    }
  }
  return MacModel({base_k1.input_alphabets()[0], x2_alphabet}, yc, std::move(w));
}

std::uint64_t MacModel::tuple_index(const std::vector<Symbol>& letters) const {
  std::uint64_t idx = 0;
  for (std::size_t i = 0; i < inputs_.size(); ++i) idx += letters[i] * strides_[i];
  return idx;
}

std::uint32_t MacModel::transmit_letter(std::uint64_t x_tuple, Rng& rng) const {
  const std::uint64_t r = rng.below(row_den_[x_tuple]);
  const auto& cum = row_cum_[x_tuple];
  for (std::uint32_t y = 0;; ++y) {
    if (r < cum[y]) return y;
  }
}

std::vector<std::uint32_t> MacModel::transmit(const std::vector<Seq>& inputs, Rng& rng) const {
  if (inputs.size() != inputs_.size()) throw DimensionError("MacModel::transmit: terminal count");
  const std::size_t n = inputs.front().size();
  for (const Seq& x : inputs) {
    if (x.size() != n) throw DimensionError("MacModel::transmit: ragged inputs");
  }
  std::vector<std::uint32_t> y(n);
  for (std::size_t t = 0; t < n; ++t) {
    std::uint64_t xt = 0;
    for (std::size_t i = 0; i < inputs.size(); ++i) xt += inputs[i][t] * strides_[i];
    y[t] = transmit_letter(xt, rng);
  }
  return y;
}

LetterPmf LetterPmf::from_quantizer(const Quantizer& quantizer) {
  if (!quantizer.per_symbol()) {
    throw DomainError("LetterPmf: quantizer must be per-symbol factorized");
  }
  LetterPmf pmf{quantizer.v_alphabet(), quantizer.x_alphabet(), {}};
  pmf.p.resize(quantizer.v_alphabet().q());
  for (std::uint32_t v = 0; v < quantizer.v_alphabet().q(); ++v) {
    pmf.p[v].resize(quantizer.x_alphabet().q());
    for (std::uint32_t x = 0; x < quantizer.x_alphabet().q(); ++x) {
      pmf.p[v][x] = quantizer.per_symbol_prob(static_cast<Symbol>(x), static_cast<Symbol>(v));
    }
  }
  return pmf;
}

LetterPmf LetterPmf::uniform(Alphabet v_alphabet, Alphabet x_alphabet) {
  LetterPmf pmf{v_alphabet, x_alphabet, {}};
  pmf.p.assign(v_alphabet.q(),
               std::vector<Rational>(x_alphabet.q(), Rational(1, x_alphabet.q())));
  return pmf;
}

LetterPmf LetterPmf::from_conditional_pmf(const ConditionalPmf& pmf) {
  if (!pmf.factorized()) throw DomainError("LetterPmf: pmf must be factorized");
  LetterPmf out{pmf.v_alphabet(), pmf.x_alphabet(), {}};
  out.p.resize(pmf.v_alphabet().q());
  for (std::uint32_t v = 0; v < pmf.v_alphabet().q(); ++v) {
    out.p[v].resize(pmf.x_alphabet().q());
    for (std::uint32_t x = 0; x < pmf.x_alphabet().q(); ++x) {
      out.p[v][x] = pmf.letter_prob(static_cast<Symbol>(x), static_cast<Symbol>(v));
    }
  }
  return out;
}

SystemLaw::SystemLaw(const SourceModel& source, const std::vector<LetterPmf>& encoder_pmfs,
                     const MacModel& mac) {
  terminals_ = source.terminals();
  if (encoder_pmfs.size() != terminals_ || mac.terminals() != terminals_) {
    throw DimensionError("SystemLaw: terminal counts do not match");
  }
  v_alphabets_ = source.alphabets();
  x_alphabets_ = mac.input_alphabets();
  for (std::uint32_t i = 0; i < terminals_; ++i) {
    if (encoder_pmfs[i].v_alphabet != v_alphabets_[i] ||
        encoder_pmfs[i].x_alphabet != x_alphabets_[i]) {
      throw DimensionError("SystemLaw: encoder pmf alphabets do not match source/channel");
    }
  }
  v_card_ = source.joint_card();
  x_card_ = mac.x_card();
  y_card_ = mac.y_card();
  v_strides_.assign(terminals_, 1);
  x_strides_.assign(terminals_, 1);
  for (std::uint32_t i = terminals_; i-- > 1;) {
    v_strides_[i - 1] = v_strides_[i] * v_alphabets_[i].q();
    x_strides_[i - 1] = x_strides_[i] * x_alphabets_[i].q();
  }

  auto v_digit = [&](std::uint64_t vt, std::uint32_t i) {
    return static_cast<std::uint32_t>((vt / v_strides_[i]) % v_alphabets_[i].q());
  };
  auto x_digit = [&](std::uint64_t xt, std::uint32_t i) {
    return static_cast<std::uint32_t>((xt / x_strides_[i]) % x_alphabets_[i].q());
  };

  // Joint per-letter law p(v) prod_i P(x_i|v_i) W(y|x).
  const std::size_t cells = static_cast<std::size_t>(v_card_) * x_card_ * y_card_;
  prob_.assign(cells, Rational(0));
  std::vector<Rational> enc(static_cast<std::size_t>(v_card_) * x_card_);
  for (std::uint64_t vt = 0; vt < v_card_; ++vt) {
    for (std::uint64_t xt = 0; xt < x_card_; ++xt) {
      Rational p(1);
      for (std::uint32_t i = 0; i < terminals_; ++i) {
        p *= encoder_pmfs[i].p[v_digit(vt, i)][x_digit(xt, i)];
        if (p.is_zero()) break;
      }
      enc[vt * x_card_ + xt] = p;
    }
  }
  for (std::uint64_t vt = 0; vt < v_card_; ++vt) {
    if (source.prob(vt).is_zero()) continue;
    for (std::uint64_t xt = 0; xt < x_card_; ++xt) {
      const Rational pe = enc[vt * x_card_ + xt];
      if (pe.is_zero()) continue;
      const Rational pv_pe = source.prob(vt) * pe;
      for (std::uint32_t y = 0; y < y_card_; ++y) {
        const Rational& w = mac.prob(xt, y);
        if (w.is_zero()) continue;
        prob_[(vt * x_card_ + xt) * y_card_ + y] = pv_pe * w;
      }
    }
  }

  const std::uint32_t masks = subset_count();
  stats_.assign(masks, std::vector<double>(cells, kNegInf));
  h_.assign(masks, std::vector<double>(v_card_, -kNegInf));
  map_.assign(cells, kNegInf);

  for (std::uint64_t vt = 0; vt < v_card_; ++vt) {
    if (source.prob(vt).is_zero()) {
      // Candidates with zero prior can still be scored by MAP (-inf) and
      // never pass typicality; leave sentinels in place.
    }
    for (std::uint64_t xt = 0; xt < x_card_; ++xt) {
      for (std::uint32_t y = 0; y < y_card_; ++y) {
        const Rational& w = mac.prob(xt, y);
        if (w.is_zero()) continue;
        const Rational score = source.prob(vt) * w;
        if (!score.is_zero()) {
          map_[(vt * x_card_ + xt) * y_card_ + y] = log_rational(score);
        }
      }
    }
  }

  for (std::uint32_t mask = 1; mask <= masks; ++mask) {
    auto proj_v = [&](std::uint64_t vt) {
      std::uint64_t key = 0;
      for (std::uint32_t i = 0; i < terminals_; ++i) {
        if (!(mask & (1u << i))) key += v_digit(vt, i) * v_strides_[i];
      }
      return key;
    };
    auto proj_x = [&](std::uint64_t xt) {
      std::uint64_t key = 0;
      for (std::uint32_t i = 0; i < terminals_; ++i) {
        if (!(mask & (1u << i))) key += x_digit(xt, i) * x_strides_[i];
      }
      return key;
    };
    // Marginal of V_{A^c}.
    std::vector<Rational> marg(v_card_, Rational(0));
    for (std::uint64_t vt = 0; vt < v_card_; ++vt) {
      marg[proj_v(vt)] += source.prob(vt);
    }
    // T_A(y | x_{A^c}, v_{A^c}) accumulated over (v_A, x_A).
    std::vector<Rational> t_table(cells, Rational(0));
    for (std::uint64_t vt = 0; vt < v_card_; ++vt) {
      const std::uint64_t pv_key = proj_v(vt);
      if (marg[pv_key].is_zero()) continue;
      const Rational cond_v = source.prob(vt) / marg[pv_key];
      if (cond_v.is_zero()) continue;
      for (std::uint64_t xt = 0; xt < x_card_; ++xt) {
        Rational pe(1);
        for (std::uint32_t i = 0; i < terminals_; ++i) {
          if (mask & (1u << i)) pe *= encoder_pmfs[i].p[v_digit(vt, i)][x_digit(xt, i)];
        }
        if (pe.is_zero()) continue;
        const Rational weight = cond_v * pe;
        const std::uint64_t px_key = proj_x(xt);
        for (std::uint32_t y = 0; y < y_card_; ++y) {
          const Rational& w = mac.prob(xt, y);
          if (w.is_zero()) continue;
          t_table[(pv_key * x_card_ + px_key) * y_card_ + y] += weight * w;
        }
      }
    }
    std::vector<double>& g = stats_[mask - 1];
    for (std::uint64_t vt = 0; vt < v_card_; ++vt) {
      const std::uint64_t pv_key = proj_v(vt);
      if (marg[pv_key].is_zero()) continue;
      const Rational cond_v = source.prob(vt) / marg[pv_key];
      if (cond_v.is_zero()) continue;
      h_[mask - 1][vt] = -log_rational(cond_v);
      for (std::uint64_t xt = 0; xt < x_card_; ++xt) {
        Rational pe(1);
        for (std::uint32_t i = 0; i < terminals_; ++i) {
          if (mask & (1u << i)) pe *= encoder_pmfs[i].p[v_digit(vt, i)][x_digit(xt, i)];
        }
        if (pe.is_zero()) continue;  // unreachable for encoder-produced candidates
        const std::uint64_t px_key = proj_x(xt);
        for (std::uint32_t y = 0; y < y_card_; ++y) {
          const Rational& w = mac.prob(xt, y);
          if (w.is_zero()) continue;
          const Rational& t = t_table[(pv_key * x_card_ + px_key) * y_card_ + y];
          // t >= cond_v * pe * w > 0 here.
          g[(vt * x_card_ + xt) * y_card_ + y] = log_rational(w * cond_v / t);
        }
      }
    }
  }
}

InfoDensity info_density(const SystemLaw& law, std::uint32_t mask, const std::vector<Seq>& v,
                         const std::vector<std::vector<Symbol>>& x,
                         const std::vector<std::uint32_t>& y) {
  if (mask < 1 || mask > law.subset_count()) throw DomainError("info_density: bad subset mask");
  const std::size_t n = y.size();
  InfoDensity out;
  double g_sum = 0.0, h_sum = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    std::uint64_t vt = 0, xt = 0;
    for (std::uint32_t i = 0; i < law.terminals(); ++i) {
      vt += v[i][t] * law.v_stride(i);
      xt += x[i][t] * law.x_stride(i);
    }
    const double h = law.h_letter(mask, vt);
    if (h > 1e290) out.h_defined = false;
    const double g = law.subset_stat(mask, vt, xt, y[t]);
    if (g < -1e290) out.i_defined = false;
    h_sum += h;
    g_sum += g;
  }
  // subset_stat carries ln W - ln T - h; add h back to isolate i.
  out.h = h_sum / static_cast<double>(n);
  out.i = (g_sum + h_sum) / static_cast<double>(n);
  return out;
}

JointDecoder::JointDecoder(const SystemLaw& law, DecoderSpec spec, std::uint32_t n,
                           std::uint64_t budget)
    : law_(law), spec_(std::move(spec)), n_(n) {
  if (spec_.gamma <= 0) throw DomainError("JointDecoder: gamma must be positive");
  if (!spec_.rho_terms.empty() && spec_.rho_terms.size() != law_.subset_count()) {
    throw DimensionError("JointDecoder: rho term count");
  }
  std::uint64_t total = 1;
  for (std::uint32_t i = 0; i < law_.terminals(); ++i) {
    candidate_counts_.push_back(sat_pow(law_.v_alphabets()[i].q(), n));
    total = total > budget ? total : total * candidate_counts_.back();
  }
  check_budget(total, budget, "JointDecoder candidate space");
}

double JointDecoder::threshold(std::uint32_t mask) const {
  const double rho = spec_.rho_terms.empty() ? 0.0 : spec_.rho_terms[mask - 1];
  return n_ * (spec_.gamma + rho);
}

DecodeOutcome JointDecoder::decode(const std::vector<std::uint32_t>& y,
                                   const std::vector<const Symbol*>& codewords,
                                   DecodeWorkspace& ws) const {
  const std::uint32_t k = law_.terminals();
  const std::uint32_t masks = law_.subset_count();
  const bool want_typ = spec_.mode != DecoderMode::kMap;
  const bool want_map = spec_.mode != DecoderMode::kTypicality;
  const std::uint32_t n_stats = (want_typ ? masks : 0) + (want_map ? 1 : 0);
  const std::uint64_t vx = law_.v_card() * law_.x_card();

  // Fold y_t into per-letter stat rows: row[(t * vx + vxi) * n_stats + s].
  ws.folded.resize(static_cast<std::size_t>(n_) * vx * n_stats);
  for (std::uint32_t t = 0; t < n_; ++t) {
    for (std::uint64_t vt = 0; vt < law_.v_card(); ++vt) {
      for (std::uint64_t xt = 0; xt < law_.x_card(); ++xt) {
        const std::uint64_t vxi = vt * law_.x_card() + xt;
        double* row = &ws.folded[(static_cast<std::size_t>(t) * vx + vxi) * n_stats];
        std::uint32_t s = 0;
        if (want_typ) {
          for (std::uint32_t mask = 1; mask <= masks; ++mask) {
            row[s++] = law_.subset_stat(mask, vt, xt, y[t]);
          }
        }
        if (want_map) row[s] = law_.map_stat(vt, xt, y[t]);
      }
    }
  }

  // Per-terminal per-candidate per-letter partial indices into vx space.
  ws.part_offset.assign(k, 0);
  std::size_t part_total = 0;
  for (std::uint32_t i = 0; i < k; ++i) {
    ws.part_offset[i] = part_total;
    part_total += candidate_counts_[i] * n_;
  }
  ws.part.resize(part_total);
  for (std::uint32_t i = 0; i < k; ++i) {
    const std::uint64_t count = candidate_counts_[i];
    const std::uint32_t qv = law_.v_alphabets()[i].q();
    const std::uint32_t v_step = static_cast<std::uint32_t>(law_.v_stride(i) * law_.x_card());
    const std::uint32_t x_step = static_cast<std::uint32_t>(law_.x_stride(i));
    std::uint32_t* dst = &ws.part[ws.part_offset[i]];
    std::vector<Symbol> v_syms(n_, 0);
    for (std::uint64_t ci = 0; ci < count; ++ci) {
      const Symbol* cw = codewords[i] + ci * n_;
      for (std::uint32_t t = 0; t < n_; ++t) {
        dst[ci * n_ + t] = v_syms[t] * v_step + cw[t] * x_step;
      }
      // lexicographic odometer over v symbols
      for (std::uint32_t t = n_; t-- > 0;) {
        if (++v_syms[t] < qv) break;
        v_syms[t] = 0;
      }
    }
  }

  std::vector<double> thr(masks);
  for (std::uint32_t mask = 1; mask <= masks; ++mask) thr[mask - 1] = threshold(mask);

  DecodeOutcome outcome;
  std::vector<std::uint64_t> first_typical(k, 0);
  std::vector<std::uint64_t> map_best(k, 0);
  double map_score = -std::numeric_limits<double>::infinity();

  // Odometer over terminals 0..k-2; innermost loop over terminal k-1.
  std::vector<std::uint64_t> outer_idx(k, 0);
  std::vector<std::uint32_t> base(n_, 0);
  const std::uint32_t last = k - 1;
  double acc[8];

  for (;;) {
    for (std::uint32_t t = 0; t < n_; ++t) {
      std::uint32_t b = 0;
      for (std::uint32_t i = 0; i < last; ++i) {
        b += ws.part[ws.part_offset[i] + outer_idx[i] * n_ + t];
      }
      base[t] = b;
    }
    const std::uint64_t last_count = candidate_counts_[last];
    const std::uint32_t* part_last = &ws.part[ws.part_offset[last]];
    for (std::uint64_t c = 0; c < last_count; ++c) {
      const std::uint32_t* pl = part_last + c * n_;
      for (std::uint32_t s = 0; s < n_stats; ++s) acc[s] = 0.0;
      for (std::uint32_t t = 0; t < n_; ++t) {
        const double* row =
            &ws.folded[(static_cast<std::size_t>(t) * vx + base[t] + pl[t]) * n_stats];
        for (std::uint32_t s = 0; s < n_stats; ++s) acc[s] += row[s];
      }
      if (want_typ) {
        bool pass = true;
        for (std::uint32_t mask = 1; mask <= masks && pass; ++mask) {
          pass = acc[mask - 1] > thr[mask - 1];
        }
        if (pass) {
          if (outcome.typical_count == 0) {
            first_typical = outer_idx;
            first_typical[last] = c;
          }
          ++outcome.typical_count;
        }
      }
      if (want_map) {
        const double score = acc[n_stats - 1];
        if (score > map_score) {
          map_score = score;
          map_best = outer_idx;
          map_best[last] = c;
        }
      }
    }
    // Advance the outer odometer.
    bool done = true;
    for (std::uint32_t i = last; i-- > 0;) {
      if (++outer_idx[i] < candidate_counts_[i]) {
        done = false;
        break;
      }
      outer_idx[i] = 0;
    }
    if (last == 0 || done) break;
  }

  if (want_typ) {
    if (outcome.typical_count == 1) {
      outcome.typ_decoded = first_typical;
      outcome.typ_ambiguous = false;
    } else if (outcome.typical_count == 0) {
      outcome.typ_decoded.assign(k, 0);  // lexicographically smallest element
      outcome.typ_ambiguous = true;
    } else {
      outcome.typ_decoded = first_typical;  // smallest typical candidate
      outcome.typ_ambiguous = true;
    }
  }
  if (want_map) outcome.map_decoded = map_best;
  return outcome;
}

std::vector<bool> JointDecoder::subset_passes(const std::vector<std::uint32_t>& y,
                                              const std::vector<const Symbol*>& codewords,
                                              const std::vector<std::uint64_t>& tuple) const {
  const std::uint32_t k = law_.terminals();
  const std::uint32_t masks = law_.subset_count();
  std::vector<bool> pass(masks, false);
  // Recover per-terminal v symbols from the candidate ranks.
  std::vector<std::vector<Symbol>> v_syms(k, std::vector<Symbol>(n_));
  for (std::uint32_t i = 0; i < k; ++i) {
    std::uint64_t rem = tuple[i];
    const std::uint32_t qv = law_.v_alphabets()[i].q();
    for (std::uint32_t t = n_; t-- > 0;) {
      v_syms[i][t] = static_cast<Symbol>(rem % qv);
      rem /= qv;
    }
  }
  for (std::uint32_t mask = 1; mask <= masks; ++mask) {
    double sum = 0.0;
    for (std::uint32_t t = 0; t < n_; ++t) {
      std::uint64_t vt = 0, xt = 0;
      for (std::uint32_t i = 0; i < k; ++i) {
        vt += v_syms[i][t] * law_.v_stride(i);
        xt += codewords[i][tuple[i] * n_ + t] * law_.x_stride(i);
      }
      sum += law_.subset_stat(mask, vt, xt, y[t]);
    }
    pass[mask - 1] = sum > threshold(mask);
  }
  return pass;
}

namespace {

struct SupportCell {
  Rational prob;
  std::vector<double> stats;  // per subset
};

std::vector<SupportCell> law_support(const SystemLaw& law) {
  std::vector<SupportCell> cells;
  for (std::uint64_t vt = 0; vt < law.v_card(); ++vt) {
    for (std::uint64_t xt = 0; xt < law.x_card(); ++xt) {
      for (std::uint32_t y = 0; y < law.y_card(); ++y) {
        const Rational& p = law.letter_prob(vt, xt, y);
        if (p.is_zero()) continue;
        SupportCell cell;
        cell.prob = p;
        for (std::uint32_t mask = 1; mask <= law.subset_count(); ++mask) {
          cell.stats.push_back(law.subset_stat(mask, vt, xt, y));
        }
        cells.push_back(std::move(cell));
      }
    }
  }
  return cells;
}

std::uint64_t compositions_count(std::uint64_t n, std::uint64_t cells) {
  // C(n + cells - 1, cells - 1), saturating.
  const std::uint64_t cap = std::uint64_t{1} << 62;
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i < cells; ++i) {
    if (r > cap / (n + i)) return cap;
    r = r * (n + i) / i;
  }
  return r;
}

}  // namespace

DecodingErrorBound decoding_error_bound(const SystemLaw& law, std::uint32_t n, double gamma,
                                        const std::vector<double>& rho_terms,
                                        std::uint64_t budget) {
  if (gamma <= 0) throw DomainError("decoding_error_bound: gamma must be positive");
  const std::vector<SupportCell> cells = law_support(law);
  check_budget(compositions_count(n, cells.size()), budget, "decoding_error_bound type enumeration");
  const std::uint32_t masks = law.subset_count();
  std::vector<double> thr(masks);
  for (std::uint32_t mask = 1; mask <= masks; ++mask) {
    const double rho = rho_terms.empty() ? 0.0 : rho_terms[mask - 1];
    thr[mask - 1] = n * (gamma + rho);
  }

  // Membership in T_{n,gamma} depends only on the letter histogram, so sum
  // multinomial probabilities over the compositions of n across the support.
  Rational atypical(0);
  std::vector<double> sums(masks, 0.0);

  // Depth-first over cells with running probability and stat sums.
  struct Frame {
    std::size_t cell;
    std::uint32_t remaining;
  };
  std::function<void(std::size_t, std::uint32_t, Rational)> walk =
      [&](std::size_t cell, std::uint32_t remaining, Rational prob) {
        if (cell + 1 == cells.size()) {
          Rational leaf = prob * Rational::pow(cells[cell].prob, remaining);
          if (leaf.is_zero()) return;
          bool typical = true;
          for (std::uint32_t s = 0; s < masks && typical; ++s) {
            typical = sums[s] + remaining * cells[cell].stats[s] > thr[s];
          }
          if (!typical) atypical += leaf;
          return;
        }
        // count = how many of the remaining letters land in this cell;
        // running prob carries C(remaining, count) p^count.
        Rational binom(1);
        Rational p_pow(1);
        for (std::uint32_t count = 0; count <= remaining; ++count) {
          if (count > 0) {
            binom *= Rational(remaining - count + 1, count);
            p_pow *= cells[cell].prob;
            for (std::uint32_t s = 0; s < masks; ++s) sums[s] += cells[cell].stats[s];
          }
          walk(cell + 1, remaining - count, prob * binom * p_pow);
        }
        for (std::uint32_t s = 0; s < masks; ++s) {
          sums[s] -= remaining * cells[cell].stats[s];
        }
      };
  walk(0, n, Rational(1));

  DecodingErrorBound out;
  out.atypicality = atypical.to_double();
  out.union_penalty = (std::pow(2.0, law.terminals()) - 1.0) * std::exp(-double(n) * gamma);
  out.bound = std::min(1.0, out.atypicality + out.union_penalty);
  out.exact = true;
  return out;
}

DecodingErrorBound decoding_error_bound_mc(const SystemLaw& law, std::uint32_t n, double gamma,
                                           std::uint64_t samples, Rng& rng,
                                           const std::vector<double>& rho_terms) {
  if (gamma <= 0) throw DomainError("decoding_error_bound_mc: gamma must be positive");
  if (samples == 0) throw DomainError("decoding_error_bound_mc: zero samples");
  const std::vector<SupportCell> cells = law_support(law);
  std::vector<Rational> probs;
  for (const SupportCell& c : cells) probs.push_back(c.prob);
  ExactSampler sampler;
  sampler.build(probs);

  const std::uint32_t masks = law.subset_count();
  std::vector<double> thr(masks);
  for (std::uint32_t mask = 1; mask <= masks; ++mask) {
    const double rho = rho_terms.empty() ? 0.0 : rho_terms[mask - 1];
    thr[mask - 1] = n * (gamma + rho);
  }
  std::uint64_t atypical = 0;
  std::vector<double> sums(masks);
  for (std::uint64_t s = 0; s < samples; ++s) {
    Rng child = rng.split(s);
    std::fill(sums.begin(), sums.end(), 0.0);
    for (std::uint32_t t = 0; t < n; ++t) {
      const std::uint32_t cell = sampler.draw(child);
      for (std::uint32_t m = 0; m < masks; ++m) sums[m] += cells[cell].stats[m];
    }
    bool typical = true;
    for (std::uint32_t m = 0; m < masks && typical; ++m) typical = sums[m] > thr[m];
    if (!typical) ++atypical;
  }
  DecodingErrorBound out;
  out.atypicality = static_cast<double>(atypical) / static_cast<double>(samples);
  out.union_penalty = (std::pow(2.0, law.terminals()) - 1.0) * std::exp(-double(n) * gamma);
  out.bound = std::min(1.0, out.atypicality + out.union_penalty);
  out.exact = false;
  out.samples = samples;
  return out;
}

InfoQuantities single_letter_quantities(const SourceModel& source,
                                        const std::vector<LetterPmf>& encoder_pmfs,
                                        const MacModel& mac, std::uint32_t block,
                                        const std::vector<double>& rho_terms,
                                        std::uint64_t budget) {
  if (block < 1) throw DomainError("single_letter_quantities: block must be >= 1");
  const SystemLaw law(source, encoder_pmfs, mac);
  const std::uint32_t masks = law.subset_count();
  const std::vector<SupportCell> cells = law_support(law);
  check_budget(sat_pow(cells.size(), block), budget, "single_letter_quantities block space");

  // Per-letter statistics: margin pieces are expectations of the subset
  // stats and of ln 1/P(v_A|v_Ac); block-N quantities follow by summing
  // over N-tuples of support letters (memoryless product law).
  InfoQuantities out;
  out.block = block;

  // Block enumeration over support cells. For each subset the block value
  // is E[sum of per-letter stats] which we accumulate exactly.
  std::vector<double> i_sum(masks, 0.0);
  std::vector<double> h_sum(masks, 0.0);

  // h per letter requires ln 1/P(v_A|v_Ac); recover it from the identity
  // g_A = ln W - ln T_A - ln 1/P(v_A|v_Ac): compute i and h separately by
  // direct sums over the joint law instead.
  for (std::uint32_t mask = 1; mask <= masks; ++mask) {
    // Marginal over V_{A^c} and conditional entropies from exact rationals.
    std::vector<Rational> marg_v(law.v_card(), Rational(0));
    for (std::uint64_t vt = 0; vt < law.v_card(); ++vt) {
      std::uint64_t key = 0;
      for (std::uint32_t i = 0; i < law.terminals(); ++i) {
        if (!(mask & (1u << i))) {
          key += ((vt / law.v_stride(i)) % law.v_alphabets()[i].q()) * law.v_stride(i);
        }
      }
      marg_v[key] += source.prob(vt);
    }
    double h = 0.0;
    for (std::uint64_t vt = 0; vt < law.v_card(); ++vt) {
      const Rational& p = source.prob(vt);
      if (p.is_zero()) continue;
      std::uint64_t key = 0;
      for (std::uint32_t i = 0; i < law.terminals(); ++i) {
        if (!(mask & (1u << i))) {
          key += ((vt / law.v_stride(i)) % law.v_alphabets()[i].q()) * law.v_stride(i);
        }
      }
      h += p.to_double() * std::log((marg_v[key] / p).to_double());
    }
    h_sum[mask - 1] = h;

    double i_val = 0.0;
    for (std::uint64_t vt = 0; vt < law.v_card(); ++vt) {
      for (std::uint64_t xt = 0; xt < law.x_card(); ++xt) {
        for (std::uint32_t y = 0; y < law.y_card(); ++y) {
          const Rational& p = law.letter_prob(vt, xt, y);
          if (p.is_zero()) continue;
          // subset_stat = ln W - ln T - ln 1/P(v_A|v_Ac); add back the h part.
          i_val += p.to_double() * law.subset_stat(mask, vt, xt, y);
        }
      }
    }
    i_sum[mask - 1] = i_val + h;
  }

  out.min_margin = std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 1; mask <= masks; ++mask) {
    SubsetQuantities sq;
    sq.mask = mask;
    // Block values are N * per-letter for the memoryless product law;
    // report the per-letter normalization (1/N) * N * value.
    sq.h_cond = h_sum[mask - 1];
    sq.i_cond = i_sum[mask - 1];
    sq.rho_term = rho_terms.empty() ? 0.0 : rho_terms[mask - 1];
    sq.margin = sq.i_cond - sq.h_cond - sq.rho_term;
    out.min_margin = std::min(out.min_margin, sq.margin);
    out.subsets.push_back(sq);
  }
  return out;
}

GridSearchResult grid_search_pmf(const SourceModel& source, const MacModel& mac,
                                 std::uint32_t resolution, std::uint32_t block,
                                 std::uint64_t budget) {
  if (resolution < 1) throw DomainError("grid_search_pmf: resolution must be >= 1");
  const std::uint32_t k = source.terminals();
  // Per-terminal grid: compositions of `resolution` into qX parts.
  std::vector<std::vector<std::vector<Rational>>> grids(k);
  for (std::uint32_t i = 0; i < k; ++i) {
    const std::uint32_t qx = mac.input_alphabets()[i].q();
    std::vector<std::uint32_t> counts(qx, 0);
    std::function<void(std::uint32_t, std::uint32_t)> rec = [&](std::uint32_t slot,
                                                                std::uint32_t remaining) {
      if (slot + 1 == qx) {
        counts[slot] = remaining;
        std::vector<Rational> pmf;
        for (std::uint32_t c : counts) pmf.emplace_back(c, resolution);
        grids[i].push_back(std::move(pmf));
        return;
      }
      for (std::uint32_t c = 0; c <= remaining; ++c) {
        counts[slot] = c;
        rec(slot + 1, remaining - c);
      }
    };
    rec(0, resolution);
  }
  std::uint64_t combos = 1;
  for (const auto& g : grids) {
    combos *= g.size();
    check_budget(combos, budget, "grid_search_pmf combinations");
  }
  if (combos == 0) throw DomainError("grid_search_pmf: empty grid");

  std::optional<GridSearchResult> best;
  std::vector<std::size_t> idx(k, 0);
  for (;;) {
    std::vector<LetterPmf> pmfs;
    for (std::uint32_t i = 0; i < k; ++i) {
      LetterPmf pmf{source.alphabets()[i], mac.input_alphabets()[i], {}};
      pmf.p.assign(source.alphabets()[i].q(), grids[i][idx[i]]);
      pmfs.push_back(std::move(pmf));
    }
    InfoQuantities q = single_letter_quantities(source, pmfs, mac, block, {}, budget);
    if (!best || q.min_margin > best->quantities.min_margin) {
      best = GridSearchResult{std::move(pmfs), std::move(q)};
    }
    std::uint32_t i = k;
    bool done = true;
    while (i-- > 0) {
      if (++idx[i] < grids[i].size()) {
        done = false;
        break;
      }
      idx[i] = 0;
    }
    if (done) break;
  }
  return *best;
}

double SimConfig::gamma_for(std::uint32_t n) const {
  if (gamma_fixed) return *gamma_fixed;
  return gamma_c / std::sqrt(static_cast<double>(n));
}

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> tokens;
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  return tokens;
}

}  // namespace

SimConfig SimConfig::parse_text(std::string_view text, const std::string& base_dir) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;

  std::uint32_t terminals = 0;
  std::vector<Alphabet> source_alphas;
  std::vector<std::pair<std::vector<Symbol>, Rational>> source_rows;
  std::uint32_t mac_y = 0;
  std::vector<std::tuple<std::vector<Symbol>, std::uint32_t, Rational>> mac_rows;
  std::optional<Matrix> code_matrix;
  std::uint32_t rlc_q = 0, rlc_mult = 1;
  std::optional<ConditionalPmf> target;
  bool target_uniform = true;
  std::vector<std::uint32_t> n_list;
  std::uint32_t trials = 0;
  std::optional<std::uint64_t> seed;
  double gamma_c = 0.5;
  std::optional<double> gamma_fixed;
  DecoderMode mode = DecoderMode::kTypicality;
  RandomizationMode randomization = RandomizationMode::kFreshPerTrial;
  BoundMode bound_mode = BoundMode::kNone;
  double rho_term = 0.0;
  std::uint64_t bound_samples = 10000;
  std::uint64_t budget = kDefaultBudget;
  std::uint32_t threads = 1;

  auto resolve = [&](const std::string& path) {
    if (path.empty() || path.front() == '/') return path;
    return base_dir + "/" + path;
  };
  auto parse_symbol = [&](const std::string& tok, std::uint32_t bound_card) {
    const long long v = std::stoll(tok);
    if (v < 0 || v >= static_cast<long long>(bound_card)) {
      throw ParseError("config: symbol out of range", line_no);
    }
    return static_cast<Symbol>(v);
  };

  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::vector<std::string> tok = tokenize(line);
    if (tok.empty()) continue;
    const std::string& key = tok[0];
    try {
      if (key == "terminals") {
        terminals = static_cast<std::uint32_t>(std::stoul(tok.at(1)));
      } else if (key == "source_q") {
        if (tok.size() != terminals + 1) throw ParseError("config: source_q count", line_no);
        for (std::uint32_t i = 0; i < terminals; ++i) {
          source_alphas.emplace_back(static_cast<std::uint32_t>(std::stoul(tok[1 + i])));
        }
      } else if (key == "source_p") {
        if (tok.size() != terminals + 2) throw ParseError("config: source_p row", line_no);
        std::vector<Symbol> letters;
        for (std::uint32_t i = 0; i < terminals; ++i) {
          letters.push_back(parse_symbol(tok[1 + i], source_alphas.at(i).q()));
        }
        source_rows.emplace_back(std::move(letters), Rational::parse(tok.back()));
      } else if (key == "mac_y") {
        mac_y = static_cast<std::uint32_t>(std::stoul(tok.at(1)));
      } else if (key == "mac_w") {
        if (tok.size() != terminals + 3) throw ParseError("config: mac_w row", line_no);
        std::vector<Symbol> letters;
        for (std::uint32_t i = 0; i < terminals; ++i) {
          letters.push_back(parse_symbol(tok[1 + i], source_alphas.at(i).q()));
        }
        const std::uint32_t y = static_cast<std::uint32_t>(std::stoul(tok[terminals + 1]));
        if (y >= mac_y) throw ParseError("config: mac_w output symbol out of range", line_no);
        mac_rows.emplace_back(std::move(letters), y, Rational::parse(tok.back()));
      } else if (key == "code") {
        if (tok.at(1) == "rlc") {
          rlc_q = static_cast<std::uint32_t>(std::stoul(tok.at(2)));
          rlc_mult = tok.size() > 3 ? static_cast<std::uint32_t>(std::stoul(tok[3])) : 1;
        } else if (tok.at(1) == "matrix") {
          code_matrix = Matrix::load_file(resolve(tok.at(2)));
        } else {
          throw ParseError("config: code must be 'rlc q [mult]' or 'matrix path'", line_no);
        }
      } else if (key == "target") {
        if (tok.at(1) == "uniform") {
          target_uniform = true;
        } else if (tok.at(1) == "file") {
          target_uniform = false;
          target = ConditionalPmf::load_file(resolve(tok.at(2)));
        } else {
          throw ParseError("config: target must be 'uniform' or 'file path'", line_no);
        }
      } else if (key == "n_list") {
        for (std::size_t i = 1; i < tok.size(); ++i) {
          n_list.push_back(static_cast<std::uint32_t>(std::stoul(tok[i])));
        }
      } else if (key == "trials") {
        trials = static_cast<std::uint32_t>(std::stoul(tok.at(1)));
      } else if (key == "seed") {
        seed = std::stoull(tok.at(1));
      } else if (key == "gamma_c") {
        gamma_c = std::stod(tok.at(1));
      } else if (key == "gamma") {
        gamma_fixed = std::stod(tok.at(1));
      } else if (key == "decoder") {
        if (tok.at(1) == "typicality") mode = DecoderMode::kTypicality;
        else if (tok.at(1) == "map") mode = DecoderMode::kMap;
        else if (tok.at(1) == "both") mode = DecoderMode::kBoth;
        else throw ParseError("config: decoder must be typicality|map|both", line_no);
      } else if (key == "randomization") {
        if (tok.at(1) == "fresh") randomization = RandomizationMode::kFreshPerTrial;
        else if (tok.at(1) == "frozen") randomization = RandomizationMode::kFrozen;
        else throw ParseError("config: randomization must be fresh|frozen", line_no);
      } else if (key == "bound") {
        if (tok.at(1) == "exact") bound_mode = BoundMode::kExact;
        else if (tok.at(1) == "mc") bound_mode = BoundMode::kMonteCarlo;
        else if (tok.at(1) == "none") bound_mode = BoundMode::kNone;
        else throw ParseError("config: bound must be exact|mc|none", line_no);
      } else if (key == "rho") {
        rho_term = std::stod(tok.at(1));
      } else if (key == "bound_samples") {
        bound_samples = std::stoull(tok.at(1));
      } else if (key == "budget") {
        budget = std::stoull(tok.at(1));
      } else if (key == "threads") {
        threads = static_cast<std::uint32_t>(std::stoul(tok.at(1)));
      } else {
        throw ParseError("config: unknown key '" + key + "'", line_no);
      }
    } catch (const std::out_of_range&) {
      throw ParseError("config: missing value for '" + key + "'", line_no);
    } catch (const std::invalid_argument&) {
      throw ParseError("config: bad value for '" + key + "'", line_no);
    }
  }

  if (terminals == 0) throw ParseError("config: 'terminals' is required", line_no);
  if (source_alphas.size() != terminals) throw ParseError("config: 'source_q' is required", line_no);
  if (!seed) throw ParseError("config: 'seed' is required for stochastic runs", line_no);
  if (n_list.empty()) throw ParseError("config: 'n_list' is required", line_no);
  if (trials == 0) throw ParseError("config: 'trials' must be positive", line_no);
  if (mac_y == 0) throw ParseError("config: 'mac_y' is required", line_no);
  if (rlc_q == 0 && !code_matrix) throw ParseError("config: 'code' is required", line_no);

  std::uint64_t v_card = 1;
  for (const Alphabet& a : source_alphas) v_card *= a.q();
  std::vector<Rational> joint(v_card, Rational(0));
  std::vector<std::uint64_t> strides(terminals, 1);
  for (std::size_t i = terminals; i-- > 1;) strides[i - 1] = strides[i] * source_alphas[i].q();
  for (const auto& [letters, p] : source_rows) {
    std::uint64_t idx = 0;
    for (std::uint32_t i = 0; i < terminals; ++i) idx += letters[i] * strides[i];
    joint[idx] = p;
  }
  SourceModel source(source_alphas, std::move(joint));

  std::vector<Rational> w(v_card * mac_y, Rational(0));
  // Channel input alphabets equal the source alphabets in this config
  // format (the per-terminal code/quantizer keeps X = V = F_q).
  for (const auto& [letters, y, p] : mac_rows) {
    std::uint64_t idx = 0;
    for (std::uint32_t i = 0; i < terminals; ++i) idx += letters[i] * strides[i];
    w[idx * mac_y + y] = p;
  }
  MacModel mac(source_alphas, mac_y, std::move(w));

  SimConfig config{std::move(source), std::move(mac)};
  config.code_matrix = std::move(code_matrix);
  config.rlc_l_multiplier = rlc_mult;
  if (!target_uniform) config.target = std::move(target);
  config.n_list = std::move(n_list);
  config.trials = trials;
  config.seed = *seed;
  config.gamma_c = gamma_c;
  config.gamma_fixed = gamma_fixed;
  config.mode = mode;
  config.randomization = randomization;
  config.bound_mode = bound_mode;
  config.rho_term = rho_term;
  config.bound_samples = bound_samples;
  config.budget = budget;
  config.threads = threads;
  if (rlc_q != 0 && !config.code_matrix) {
    for (const Alphabet& a : config.source.alphabets()) {
      if (a.q() != rlc_q) throw ConfigError("config: rlc q must match the source alphabets");
    }
  }
  return config;
}

SimConfig SimConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  const auto slash = path.find_last_of('/');
  const std::string dir = slash == std::string::npos ? "." : path.substr(0, slash);
  return parse_text(buf.str(), dir);
}

namespace {

// All candidate codewords Phi(v) for v in lexicographic order, written as
// a flat buffer of cand_count * m output symbols. Uses the linearity of
// F̂: with prow_i = inner-permuted row sigma_out(row_{sigma_in(i)}), the
// coded word is sum_i v_i prow_i + offset, built by depth-first partial
// sums instead of per-candidate matrix products.
void all_codewords_into(const Quantizer& quantizer, const RandomizedAffineCode& rc,
                        Symbol* out) {
  const std::uint32_t n = quantizer.n();
  const std::uint32_t l = quantizer.l();
  const std::uint32_t m = quantizer.m();
  const std::uint32_t qv = quantizer.v_alphabet().q();
  const std::uint32_t qu = quantizer.u_alphabet().q();
  const Matrix& gen = rc.base().generator();

  // prow[i][t]: permuted generator rows; offset baked into the root sums.
  std::vector<std::uint32_t> prow(static_cast<std::size_t>(n) * l);
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::uint32_t src_row = rc.outer().image_of(i);
    for (std::uint32_t j = 0; j < l; ++j) {
      prow[static_cast<std::size_t>(i) * l + rc.inner().image_of(j)] = gen.at(src_row, j);
    }
  }

  const bool blockwise = quantizer.per_symbol();
  const std::uint32_t l0 = blockwise ? quantizer.block_size() : 0;
  std::vector<Symbol> u_mod(l);
  std::uint64_t ci = 0;

  // acc carries unreduced partial sums; depth d fixes v_0..v_{d-1}.
  std::vector<std::uint32_t> acc(static_cast<std::size_t>(n + 1) * l, 0);
  for (std::uint32_t j = 0; j < l; ++j) acc[j] = rc.offset()[j];

  std::vector<Symbol> v_digit(n, 0);
  std::uint32_t depth = 0;
  for (;;) {
    if (depth == n) {
      const std::uint32_t* sums = &acc[static_cast<std::size_t>(n) * l];
      Symbol* dst = out + ci * m;
      if (blockwise) {
        const bool conditional = quantizer.kind() == Quantizer::Kind::kBlockwiseConditional;
        for (std::uint32_t b = 0; b < m; ++b) {
          std::uint64_t rank = 0;
          for (std::uint32_t t = 0; t < l0; ++t) rank = rank * qu + sums[b * l0 + t] % qu;
          dst[b] = quantizer.evaluate_block(conditional ? v_digit[b] : 0, rank);
        }
      } else {
        for (std::uint32_t j = 0; j < l; ++j) u_mod[j] = static_cast<Symbol>(sums[j] % qu);
        const Seq u(quantizer.u_alphabet(), u_mod);
        std::vector<Symbol> v_syms(v_digit.begin(), v_digit.end());
        const Seq v(quantizer.v_alphabet(), std::move(v_syms));
        const Seq x = quantizer.evaluate(v, u);
        std::copy(x.symbols().begin(), x.symbols().end(), dst);
      }
      ++ci;
      // Backtrack to the deepest digit that can advance.
      while (depth > 0) {
        Symbol& d = v_digit[depth - 1];
        if (++d < qv) break;
        d = 0;
        --depth;
      }
      if (depth == 0) return;
      // Refresh the partial sum of the advanced digit; deeper levels are
      // rebuilt by the descend branch.
      const std::uint32_t i = depth - 1;
      const std::uint32_t* src = &acc[static_cast<std::size_t>(i) * l];
      std::uint32_t* cur = &acc[static_cast<std::size_t>(i + 1) * l];
      const std::uint32_t* row = &prow[static_cast<std::size_t>(i) * l];
      const std::uint32_t s = v_digit[i];
      for (std::uint32_t j = 0; j < l; ++j) cur[j] = src[j] + s * row[j];
      continue;
    }
    // Descend with digit 0: partial sums copy through.
    const std::uint32_t i = depth;
    const std::uint32_t* src = &acc[static_cast<std::size_t>(i) * l];
    std::uint32_t* cur = &acc[static_cast<std::size_t>(i + 1) * l];
    std::copy(src, src + l, cur);
    ++depth;
  }
}

}  // namespace

std::vector<SimulationReport> run_simulation(const SimConfig& config) {
  std::vector<SimulationReport> reports;
  const std::uint32_t k = config.source.terminals();

  for (const std::uint32_t n : config.n_list) {
    // Code dimensions for this blocklength.
    LinearCode base_code = [&] {
      if (config.code_matrix) {
        if (config.code_matrix->rows() != n) {
          throw ConfigError("simulate: matrix code has n=" +
                            std::to_string(config.code_matrix->rows()) +
                            " but n_list requests " + std::to_string(n));
        }
        return LinearCode(*config.code_matrix);
      }
      return LinearCode(Matrix::zeros(config.source.alphabets()[0], n,
                                      n * config.rlc_l_multiplier));  // placeholder shape
    }();
    const std::uint32_t l = base_code.output_length();
    const Alphabet u_alpha = base_code.alphabet();

    // Target pmf scaled to this blocklength (per-symbol rows carry over).
    ConditionalPmf target = [&] {
      if (!config.target) {
        std::vector<Rational> uniform(u_alpha.q(), Rational(1, u_alpha.q()));
        return ConditionalPmf::per_symbol_marginal(u_alpha, n, u_alpha, n, std::move(uniform));
      }
      const ConditionalPmf& t = *config.target;
      if (t.kind() == ConditionalPmf::Kind::kPerSymbolMarginal) {
        return ConditionalPmf::per_symbol_marginal(t.v_alphabet(), n, t.x_alphabet(), n,
                                                   t.marginal_row());
      }
      if (t.n() != n || t.m() != n) {
        throw ConfigError("simulate: full-table target pmf does not match n");
      }
      return t;
    }();

    const QuantizerBuild qb = build_quantizer(target, u_alpha, l, config.budget);
    const Quantizer& quantizer = qb.quantizer;
    std::vector<LetterPmf> letter_pmfs(k, LetterPmf::from_quantizer(quantizer));
    const SystemLaw law(config.source, letter_pmfs, config.mac);

    DecoderSpec spec;
    spec.gamma = config.gamma_for(n);
    spec.mode = config.mode;
    spec.rho_terms.assign(law.subset_count(), config.rho_term);
    const JointDecoder decoder(law, spec, n, config.budget);

    const CodeEnsemble ensemble =
        config.code_matrix ? CodeEnsemble::deterministic(base_code)
                           : CodeEnsemble::random_linear(u_alpha, n, l);

    const Rng run_rng(config.seed, n);
    Rng setup_rng = run_rng.split(0xa11ce);

    // Frozen mode: one sample encoder per terminal for the whole run.
    std::vector<JsccEncoder> frozen;
    std::vector<std::vector<std::vector<Symbol>>> frozen_codewords(k);
    if (config.randomization == RandomizationMode::kFrozen) {
      for (std::uint32_t i = 0; i < k; ++i) {
        Rng enc_rng = setup_rng.split(i);
        LinearCode code = ensemble.sample(enc_rng);
        frozen.push_back(JsccEncoder::draw(code, quantizer, enc_rng));
      }
    }

    SimulationReport report;
    report.n = n;
    report.trials = config.trials;
    report.seed = config.seed;
    report.gamma = spec.gamma;
    report.subset_fail_counts.assign(law.subset_count(), 0);
    report.bound = std::numeric_limits<double>::quiet_NaN();

    const std::uint64_t cand_count = sat_pow(u_alpha.q(), n);
    std::vector<std::vector<Symbol>> codeword_tables(
        k, std::vector<Symbol>(cand_count * n));
    std::vector<const Symbol*> flats(k);
    for (std::uint32_t i = 0; i < k; ++i) flats[i] = codeword_tables[i].data();
    if (config.randomization == RandomizationMode::kFrozen) {
      for (std::uint32_t i = 0; i < k; ++i) {
        all_codewords_into(frozen[i].quantizer(), frozen[i].randomization(),
                           codeword_tables[i].data());
      }
    }

    struct Tally {
      std::uint64_t typ_errors = 0;
      std::uint64_t map_errors = 0;
      std::uint64_t ambiguous = 0;
      std::vector<std::uint64_t> subset_fails;
    };

    const bool fresh = config.randomization == RandomizationMode::kFreshPerTrial;
    auto run_range = [&](std::uint32_t first, std::uint32_t last, Tally& tally) {
      tally.subset_fails.assign(law.subset_count(), 0);
      // Fresh randomization rebuilds codeword tables per trial, so each
      // range owns private buffers; frozen tables are shared read-only.
      std::vector<std::vector<Symbol>> local_tables;
      std::vector<const Symbol*> local_flats = flats;
      if (fresh) {
        local_tables.assign(k, std::vector<Symbol>(cand_count * n));
        for (std::uint32_t i = 0; i < k; ++i) local_flats[i] = local_tables[i].data();
      }
      DecodeWorkspace ws;
      std::vector<Seq> x;
      for (std::uint32_t trial = first; trial < last; ++trial) {
        Rng trial_rng = run_rng.split(trial + 1);
        if (fresh) {
          for (std::uint32_t i = 0; i < k; ++i) {
            Rng enc_rng = trial_rng.split(0x5eed00 + i);
            LinearCode code = ensemble.sample(enc_rng);
            const RandomizedAffineCode rc = RandomizedAffineCode::draw(std::move(code), enc_rng);
            all_codewords_into(quantizer, rc, local_tables[i].data());
          }
        }
        // Sample sources, encode via the candidate tables, transmit.
        Rng sample_rng = trial_rng.split(1);
        const std::vector<Seq> v = config.source.sample(n, sample_rng);
        std::vector<std::uint64_t> true_idx(k);
        x.clear();
        for (std::uint32_t i = 0; i < k; ++i) {
          true_idx[i] = v[i].to_index();
          std::vector<Symbol> syms(local_flats[i] + true_idx[i] * n,
                                   local_flats[i] + (true_idx[i] + 1) * n);
          x.emplace_back(config.mac.input_alphabets()[i], std::move(syms));
        }
        Rng chan_rng = trial_rng.split(2);
        const std::vector<std::uint32_t> y = config.mac.transmit(x, chan_rng);

        const DecodeOutcome outcome = decoder.decode(y, local_flats, ws);
        if (config.mode != DecoderMode::kMap) {
          if (outcome.typ_decoded != true_idx) ++tally.typ_errors;
          if (outcome.typ_ambiguous) ++tally.ambiguous;
          const std::vector<bool> passes = decoder.subset_passes(y, local_flats, true_idx);
          for (std::size_t s = 0; s < passes.size(); ++s) {
            if (!passes[s]) ++tally.subset_fails[s];
          }
        }
        if (config.mode != DecoderMode::kTypicality) {
          if (outcome.map_decoded != true_idx) ++tally.map_errors;
        }
      }
    };

    const std::uint32_t thread_count =
        std::max<std::uint32_t>(1, std::min(config.threads, config.trials));
    std::vector<Tally> tallies(thread_count);
    if (thread_count == 1) {
      run_range(0, config.trials, tallies[0]);
    } else {
      std::vector<std::thread> pool;
      const std::uint32_t chunk = (config.trials + thread_count - 1) / thread_count;
      for (std::uint32_t tix = 0; tix < thread_count; ++tix) {
        const std::uint32_t first = tix * chunk;
        const std::uint32_t last = std::min(config.trials, first + chunk);
        pool.emplace_back(run_range, first, last, std::ref(tallies[tix]));
      }
      for (std::thread& th : pool) th.join();
    }
    for (const Tally& tally : tallies) {
      report.typ_errors += tally.typ_errors;
      report.map_errors += tally.map_errors;
      report.ambiguous_count += tally.ambiguous;
      for (std::size_t s = 0; s < tally.subset_fails.size(); ++s) {
        report.subset_fail_counts[s] += tally.subset_fails[s];
      }
    }
    report.eps_hat = static_cast<double>(config.mode == DecoderMode::kMap ? report.map_errors
                                                                          : report.typ_errors) /
                     config.trials;

    if (config.bound_mode == BoundMode::kExact) {
      const DecodingErrorBound b = decoding_error_bound(law, n, spec.gamma, spec.rho_terms, config.budget);
      report.bound = b.bound;
      report.bound_exact = true;
    } else if (config.bound_mode == BoundMode::kMonteCarlo) {
      Rng bound_rng = run_rng.split(0xb0b0);
      const DecodingErrorBound b =
          decoding_error_bound_mc(law, n, spec.gamma, config.bound_samples, bound_rng, spec.rho_terms);
      report.bound = b.bound;
      report.bound_exact = false;
    }
    reports.push_back(std::move(report));
  }
  return reports;
}

std::string reports_to_csv(const std::vector<SimulationReport>& reports, DecoderMode mode) {
  std::ostringstream out;
  out << "n,trials,errors,eps_hat,bound,seed";
  if (mode == DecoderMode::kBoth) out << ",map_errors,map_eps";
  out << '\n';
  for (const SimulationReport& r : reports) {
    const std::uint64_t errors = mode == DecoderMode::kMap ? r.map_errors : r.typ_errors;
    out << r.n << ',' << r.trials << ',' << errors << ','
        << format_g12(static_cast<double>(errors) / r.trials) << ',';
    if (std::isnan(r.bound)) out << "na";
    else out << format_g12(r.bound);
    out << ',' << r.seed;
    if (mode == DecoderMode::kBoth) {
      out << ',' << r.map_errors << ','
          << format_g12(static_cast<double>(r.map_errors) / r.trials);
    }
    out << '\n';
  }
  return out.str();
}

std::string format_g12(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  return std::string(buf);
}

}  // namespace codespec
