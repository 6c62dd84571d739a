#include "codespec/spectra.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace codespec {

TypeVector::TypeVector(Alphabet alphabet, std::uint32_t n, std::vector<std::uint32_t> counts)
    : alphabet_(alphabet), n_(n), counts_(std::move(counts)) {
  if (counts_.size() != alphabet_.q()) throw DimensionError("TypeVector: counts size != q");
  const std::uint64_t sum = std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
  if (sum != n_) throw DomainError("TypeVector: counts must sum to n");
}

TypeVector TypeVector::zero_type(Alphabet alphabet, std::uint32_t n) {
  std::vector<std::uint32_t> counts(alphabet.q(), 0);
  counts[0] = n;
  return TypeVector(alphabet, n, std::move(counts));
}

std::string TypeVector::to_string() const {
  std::string out = "(";
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    if (i) out.push_back(',');
    out += std::to_string(counts_[i]);
  }
  out.push_back(')');
  return out;
}

TypeVector type_of(const Seq& x) {
  std::vector<std::uint32_t> counts(x.alphabet().q(), 0);
  for (std::size_t i = 0; i < x.size(); ++i) ++counts[x[i]];
  return TypeVector(x.alphabet(), static_cast<std::uint32_t>(x.size()), std::move(counts));
}

BigInt type_class_size(const TypeVector& p) { return BigInt::multinomial(p.n(), p.counts()); }

namespace {

void enumerate_compositions(std::uint32_t remaining, std::size_t slot,
                            std::vector<std::uint32_t>& counts,
                            const std::function<void(const std::vector<std::uint32_t>&)>& emit) {
  if (slot + 1 == counts.size()) {
    counts[slot] = remaining;
    emit(counts);
    return;
  }
  for (std::uint32_t c = 0; c <= remaining; ++c) {
    counts[slot] = c;
    enumerate_compositions(remaining - c, slot + 1, counts, emit);
  }
}

}  // namespace

std::vector<TypeVector> all_types(Alphabet alphabet, std::uint32_t n) {
  std::vector<TypeVector> out;
  std::vector<std::uint32_t> counts(alphabet.q(), 0);
  enumerate_compositions(n, 0, counts, [&](const std::vector<std::uint32_t>& c) {
    out.emplace_back(alphabet, n, c);
  });
  std::sort(out.begin(), out.end());
  return out;
}

void Spectrum::add(const TypeVector& type, const Rational& mass) {
  if (type.n() != n_ || type.alphabet() != alphabet_) {
    throw DimensionError("Spectrum::add: type shape mismatch");
  }
  auto [it, inserted] = cells_.try_emplace(type.counts(), mass);
  if (!inserted) it->second += mass;
}

Rational Spectrum::at(const TypeVector& type) const {
  auto it = cells_.find(type.counts());
  return it == cells_.end() ? Rational(0) : it->second;
}

Rational Spectrum::total() const {
  Rational t(0);
  for (const auto& [key, mass] : cells_) t += mass;
  return t;
}

std::string Spectrum::to_csv() const {
  std::ostringstream out;
  for (std::uint32_t a = 0; a < alphabet_.q(); ++a) out << 'c' << a << ',';
  out << "num,den\n";
  for (const auto& [key, mass] : cells_) {
    for (std::uint32_t c : key) out << c << ',';
    out << mass.num().to_string() << ',' << mass.den().to_string() << '\n';
  }
  return out.str();
}

void JointSpectrum::add(const TypeVector& p, const TypeVector& q, const Rational& mass) {
  if (p.n() != n_ || p.alphabet() != in_alphabet_ || q.n() != m_ || q.alphabet() != out_alphabet_) {
    throw DimensionError("JointSpectrum::add: type shape mismatch");
  }
  JointKey key{p.counts(), q.counts()};
  auto [it, inserted] = cells_.try_emplace(std::move(key), mass);
  if (!inserted) it->second += mass;
}

Rational JointSpectrum::at(const TypeVector& p, const TypeVector& q) const {
  auto it = cells_.find(JointKey{p.counts(), q.counts()});
  return it == cells_.end() ? Rational(0) : it->second;
}

Rational JointSpectrum::total() const {
  Rational t(0);
  for (const auto& [key, mass] : cells_) t += mass;
  return t;
}

Spectrum JointSpectrum::marginal_in() const {
  Spectrum s(in_alphabet_, n_);
  for (const auto& [key, mass] : cells_) {
    s.add(TypeVector(in_alphabet_, n_, key.first), mass);
  }
  return s;
}

Spectrum JointSpectrum::marginal_out() const {
  Spectrum s(out_alphabet_, m_);
  for (const auto& [key, mass] : cells_) {
    s.add(TypeVector(out_alphabet_, m_, key.second), mass);
  }
  return s;
}

std::string JointSpectrum::to_csv() const {
  std::ostringstream out;
  for (std::uint32_t a = 0; a < in_alphabet_.q(); ++a) out << 'p' << a << ',';
  for (std::uint32_t a = 0; a < out_alphabet_.q(); ++a) out << 'q' << a << ',';
  out << "num,den\n";
  for (const auto& [key, mass] : cells_) {
    for (std::uint32_t c : key.first) out << c << ',';
    for (std::uint32_t c : key.second) out << c << ',';
    out << mass.num().to_string() << ',' << mass.den().to_string() << '\n';
  }
  return out.str();
}

Spectrum ambient_spectrum(std::uint32_t n, Alphabet alphabet) {
  if (n == 0) throw DomainError("ambient_spectrum: n must be >= 1");
  Spectrum s(alphabet, n);
  const BigInt qn = BigInt::pow(BigInt(alphabet.q()), n);
  for (const TypeVector& p : all_types(alphabet, n)) {
    s.add(p, Rational(type_class_size(p), qn));
  }
  return s;
}

JointSpectrum ambient_joint_spectrum(std::uint32_t n, Alphabet in_alphabet, std::uint32_t m,
                                     Alphabet out_alphabet) {
  JointSpectrum j(in_alphabet, n, out_alphabet, m);
  const Spectrum sn = ambient_spectrum(n, in_alphabet);
  const Spectrum sm = ambient_spectrum(m, out_alphabet);
  for (const auto& [pk, pv] : sn.cells()) {
    for (const auto& [qk, qv] : sm.cells()) {
      j.add(TypeVector(in_alphabet, n, pk), TypeVector(out_alphabet, m, qk), pv * qv);
    }
  }
  return j;
}

Spectrum set_spectrum(const std::vector<Seq>& a) {
  if (a.empty()) throw DomainError("set_spectrum: empty set");
  Spectrum s(a.front().alphabet(), static_cast<std::uint32_t>(a.front().size()));
  const Rational w(1, static_cast<std::int64_t>(a.size()));
  for (const Seq& x : a) {
    if (x.size() != a.front().size()) throw DimensionError("set_spectrum: ragged lengths");
    s.add(type_of(x), w);
  }
  return s;
}

JointSpectrum relation_joint_spectrum(const std::vector<std::pair<Seq, Seq>>& pairs) {
  if (pairs.empty()) throw DomainError("relation_joint_spectrum: empty relation");
  const auto& first = pairs.front();
  JointSpectrum j(first.first.alphabet(), static_cast<std::uint32_t>(first.first.size()),
                  first.second.alphabet(), static_cast<std::uint32_t>(first.second.size()));
  const Rational w(1, static_cast<std::int64_t>(pairs.size()));
  for (const auto& [x, y] : pairs) {
    if (x.size() != first.first.size() || y.size() != first.second.size()) {
      throw DimensionError("relation_joint_spectrum: ragged lengths");
    }
    j.add(type_of(x), type_of(y), w);
  }
  return j;
}

JointSpectrum function_joint_spectrum(const std::vector<std::pair<Seq, Seq>>& graph) {
  return relation_joint_spectrum(graph);
}

std::map<TypeKey, Rational> conditional_spectrum(const JointSpectrum& joint,
                                                 ConditionalDirection direction,
                                                 const TypeVector& given) {
  const bool forward = direction == ConditionalDirection::kForwardGivenIn;
  const Spectrum marginal = forward ? joint.marginal_in() : joint.marginal_out();
  const Rational denom = marginal.at(given);
  if (denom.is_zero()) {
    throw DomainError("conditional_spectrum: conditioning type has zero marginal");
  }
  std::map<TypeKey, Rational> out;
  for (const auto& [key, mass] : joint.cells()) {
    const TypeKey& cond = forward ? key.first : key.second;
    const TypeKey& free = forward ? key.second : key.first;
    if (cond == given.counts()) out.emplace(free, mass / denom);
  }
  return out;
}

std::map<ProductKey, Rational> product_spectrum(const std::vector<Spectrum>& components) {
  if (components.empty()) throw DomainError("product_spectrum: no components");
  std::map<ProductKey, Rational> acc;
  acc.emplace(ProductKey{}, Rational(1));
  for (const Spectrum& s : components) {
    std::map<ProductKey, Rational> next;
    for (const auto& [prefix, pv] : acc) {
      for (const auto& [key, mass] : s.cells()) {
        ProductKey k = prefix;
        k.push_back(key);
        next.emplace(std::move(k), pv * mass);
      }
    }
    acc = std::move(next);
  }
  return acc;
}

std::map<ProductKey, Rational> product_set_spectrum(const std::vector<std::vector<Seq>>& sets,
                                                    std::uint64_t budget) {
  if (sets.empty()) throw DomainError("product_set_spectrum: no components");
  std::uint64_t total = 1;
  for (const auto& s : sets) {
    if (s.empty()) throw DomainError("product_set_spectrum: empty component");
    total = total * static_cast<std::uint64_t>(s.size());
    check_budget(total, budget, "product_set_spectrum");
  }
  std::map<ProductKey, Rational> out;
  const Rational w(1, static_cast<std::int64_t>(total));
  std::vector<std::size_t> idx(sets.size(), 0);
  for (;;) {
    ProductKey key;
    key.reserve(sets.size());
    for (std::size_t i = 0; i < sets.size(); ++i) key.push_back(type_of(sets[i][idx[i]]).counts());
    auto [it, inserted] = out.try_emplace(std::move(key), w);
    if (!inserted) it->second += w;
    std::size_t i = sets.size();
    while (i-- > 0) {
      if (++idx[i] < sets[i].size()) break;
      idx[i] = 0;
      if (i == 0) return out;
    }
  }
}

JointSpectrum random_binning_expected_spectrum(std::uint32_t n, Alphabet in_alphabet,
                                               std::uint32_t m, Alphabet out_alphabet) {
  return ambient_joint_spectrum(n, in_alphabet, m, out_alphabet);
}

bool verify_random_binning(std::uint32_t n, Alphabet in_alphabet, std::uint32_t m,
                           Alphabet out_alphabet, std::uint64_t budget) {
  const std::uint64_t domain = sat_pow(in_alphabet.q(), n);
  const std::uint64_t range = sat_pow(out_alphabet.q(), m);
  check_budget(domain, budget, "verify_random_binning domain");
  const std::uint64_t functions = sat_pow(range, static_cast<std::uint32_t>(domain));
  check_budget(functions, budget, "verify_random_binning function count");

  std::vector<Seq> inputs;
  inputs.reserve(domain);
  for (std::uint64_t i = 0; i < domain; ++i) inputs.push_back(Seq::from_index(in_alphabet, n, i));
  std::vector<TypeVector> in_types;
  in_types.reserve(domain);
  for (const Seq& x : inputs) in_types.push_back(type_of(x));
  std::vector<TypeVector> out_types;
  out_types.reserve(range);
  for (std::uint64_t i = 0; i < range; ++i) {
    out_types.push_back(type_of(Seq::from_index(out_alphabet, m, i)));
  }

  // Mean joint spectrum over every binning function, tallied as integer
  // counts of (input type, output type) incidences.
  std::map<JointKey, std::uint64_t> tally;
  std::vector<std::uint64_t> assign(domain, 0);
  for (std::uint64_t f = 0; f < functions; ++f) {
    std::uint64_t rem = f;
    for (std::uint64_t i = 0; i < domain; ++i) {
      assign[i] = rem % range;
      rem /= range;
    }
    for (std::uint64_t i = 0; i < domain; ++i) {
      JointKey key{in_types[i].counts(), out_types[assign[i]].counts()};
      ++tally[key];
    }
  }

  JointSpectrum mean(in_alphabet, n, out_alphabet, m);
  const BigInt denom = BigInt::from_uint64(functions) * BigInt::from_uint64(domain);
  for (const auto& [key, count] : tally) {
    mean.add(TypeVector(in_alphabet, n, key.first), TypeVector(out_alphabet, m, key.second),
             Rational(BigInt::from_uint64(count), denom));
  }
  return mean == random_binning_expected_spectrum(n, in_alphabet, m, out_alphabet);
}

bool check_perm_invariance(const std::vector<std::pair<Seq, Seq>>& graph, const Perm& sigma_in,
                           const Perm& sigma_out) {
  if (graph.empty()) throw DomainError("check_perm_invariance: empty graph");
  if (sigma_in.size() != graph.front().first.size() ||
      sigma_out.size() != graph.front().second.size()) {
    throw DimensionError("check_perm_invariance: permutation length mismatch");
  }
  // Graph of sigma_out ∘ f ∘ sigma_in: x -> sigma_out(f(sigma_in(x))),
  // i.e. the pair (sigma_in^{-1}(x), sigma_out(y)) ranges over the new graph.
  const Perm inv_in = sigma_in.inverse();
  std::vector<std::pair<Seq, Seq>> permuted;
  permuted.reserve(graph.size());
  for (const auto& [x, y] : graph) {
    permuted.emplace_back(inv_in.apply(x), sigma_out.apply(y));
  }
  return relation_joint_spectrum(permuted) == relation_joint_spectrum(graph);
}

}  // namespace codespec
