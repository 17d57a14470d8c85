#include "effeq/resonance.hpp"

#include "effeq/errors.hpp"
#include "effeq/union_find.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <tuple>

namespace effeq {

std::string to_string(ResonanceKind kind) {
  switch (kind) {
    case ResonanceKind::NlsQuadruple: return "nls-quadruple";
    case ResonanceKind::ChmCaseI: return "chm-i";
    case ResonanceKind::ChmCaseIIIa: return "chm-iii-a";
    case ResonanceKind::ChmCaseIIIb: return "chm-iii-b";
    case ResonanceKind::ChmCaseIV: return "chm-iv";
  }
  return "unknown";
}

std::vector<ResonantTuple> active_tuples(const std::vector<ResonantTuple>& tuples) {
  std::vector<ResonantTuple> out;
  for (const auto& t : tuples)
    if (!t.vanishing_coefficient) out.push_back(t);
  return out;
}

namespace {

struct PairEntry {
  std::int64_t sum_code;
  std::int64_t norm_sum;
  std::uint32_t i;
  std::uint32_t j;
};

}  // namespace

std::vector<ResonantTuple> enumerate_nls_quadruples(int dim, int cutoff, const EnumerationBudget& budget,
                                                    FrequencyFilter filter) {
  if (cutoff < 1) throw std::invalid_argument("cutoff must be at least 1");
  const LatticeBox box(dim, cutoff);
  const std::size_t n = box.size();
  const std::size_t pair_count = n * (n + 1) / 2;
  if (pair_count > budget.max_pairs) {
    throw ResourceError("quadruple enumeration at d=" + std::to_string(dim) + ", K=" + std::to_string(cutoff) +
                        " needs " + std::to_string(pair_count) + " pairs; budget is " +
                        std::to_string(budget.max_pairs));
  }

  std::vector<WaveVector> vecs(n);
  std::vector<std::int64_t> norms(n);
  for (std::size_t i = 0; i < n; ++i) {
    vecs[i] = box.vector(i);
    norms[i] = vecs[i].norm2();
  }
  const std::int64_t sum_side = 4 * cutoff + 1;
  auto sum_code = [&](std::size_t i, std::size_t j) {
    std::int64_t code = 0;
    for (int c = 0; c < dim; ++c) code = code * sum_side + (vecs[i][c] + vecs[j][c] + 2 * cutoff);
    return code;
  };

  std::vector<PairEntry> pairs;
  pairs.reserve(pair_count);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const std::int64_t ns = filter == FrequencyFilter::Resonant ? norms[i] + norms[j] : 0;
      pairs.push_back({sum_code(i, j), ns, static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const PairEntry& a, const PairEntry& b) {
    return std::tie(a.sum_code, a.norm_sum, a.i, a.j) < std::tie(b.sum_code, b.norm_sum, b.i, b.j);
  });

  std::vector<ResonantTuple> out;
  for (std::size_t lo = 0; lo < pairs.size();) {
    std::size_t hi = lo + 1;
    while (hi < pairs.size() && pairs[hi].sum_code == pairs[lo].sum_code && pairs[hi].norm_sum == pairs[lo].norm_sum)
      ++hi;
    for (std::size_t a = lo; a < hi; ++a) {
      for (std::size_t b = lo; b < hi; ++b) {
        if (a == b) continue;  // identical multisets: trivial
        const auto& in = pairs[a];
        const auto& ou = pairs[b];
        ResonantTuple t;
        t.kind = ResonanceKind::NlsQuadruple;
        t.inputs = {vecs[in.i], vecs[in.j]};
        t.outputs = {vecs[ou.i], vecs[ou.j]};
        out.push_back(t);
        if (ou.i != ou.j) {
          t.outputs = {vecs[ou.j], vecs[ou.i]};
          out.push_back(std::move(t));
        }
      }
    }
    lo = hi;
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool is_rectangle(const std::array<WaveVector, 4>& quad) {
  const auto& [k, k1, k2, k3] = quad;
  require_same_dim(k, k1);
  require_same_dim(k, k2);
  require_same_dim(k, k3);
  if (k1 - k != k3 - k2) return false;
  return dot(k3 - k2, k3 - k1) == 0;
}

namespace {

Rational chm_weight(const WaveVector& k, const Rational& rho2) {
  return Rational(static_cast<std::int64_t>(k.m()) * k.m()) + Rational(static_cast<std::int64_t>(k.n()) * k.n()) * rho2;
}

// Symmetrized coefficient numerator for the unordered input pair.
Rational chm_symmetric_coefficient(const WaveVector& k1, const WaveVector& k2, const Rational& rho2) {
  const std::int64_t cross = static_cast<std::int64_t>(k1.m()) * k2.n() - static_cast<std::int64_t>(k1.n()) * k2.m();
  return Rational(cross) * (chm_weight(k1, rho2) - chm_weight(k2, rho2));
}

ResonanceKind chm_case(const WaveVector& k1, const WaveVector& k2, const WaveVector& k) {
  const int zeros = (k1.m() == 0) + (k2.m() == 0) + (k.m() == 0);
  if (zeros == 3) return ResonanceKind::ChmCaseI;
  if (zeros == 0) return ResonanceKind::ChmCaseIV;
  // zeros == 2 is impossible because m = m1 + m2.
  return k.m() == 0 ? ResonanceKind::ChmCaseIIIb : ResonanceKind::ChmCaseIIIa;
}

template <typename Fn>
void for_each_chm_pair(int cutoff, Fn&& fn) {
  const LatticeBox box(2, cutoff);
  for (std::size_t i = 0; i < box.size(); ++i) {
    const WaveVector k1 = box.vector(i);
    for (std::size_t j = i; j < box.size(); ++j) {
      const WaveVector k2 = box.vector(j);
      const WaveVector k = k1 + k2;
      if (box.contains(k)) fn(k1, k2, k);
    }
  }
}

}  // namespace

std::vector<ResonantTuple> enumerate_chm_triads(const Rational& rho_squared, const Rational& froude, int cutoff) {
  if (rho_squared <= 0) throw std::invalid_argument("rho^2 must be positive");
  if (froude < 0) throw std::invalid_argument("Froude number must be nonnegative");
  if (cutoff < 1) throw std::invalid_argument("cutoff must be at least 1");

  std::vector<ResonantTuple> out;
  for_each_chm_pair(cutoff, [&](const WaveVector& k1, const WaveVector& k2, const WaveVector& k) {
    // Frequency condition with the common factor -rho removed.
    auto reduced = [&](const WaveVector& v) {
      if (v.m() == 0) return Rational(0);
      return Rational(v.m()) / (chm_weight(v, 0) + (Rational(static_cast<std::int64_t>(v.n()) * v.n()) + froude) * rho_squared);
    };
    if (reduced(k1) + reduced(k2) != reduced(k)) return;
    ResonantTuple t;
    t.inputs = {k1, k2};
    t.outputs = {k};
    t.kind = chm_case(k1, k2, k);
    t.vanishing_coefficient = chm_symmetric_coefficient(k1, k2, rho_squared) == 0;
    out.push_back(std::move(t));
  });
  std::sort(out.begin(), out.end());
  return out;
}

ChmResonancePolynomial chm_resonance_polynomial(const WaveVector& k1, const WaveVector& k2, const Rational& froude) {
  const WaveVector k = k1 + k2;
  const BigInt m1 = k1.m(), m2 = k2.m(), m = k.m();
  const Rational alpha1 = Rational(static_cast<std::int64_t>(k1.n()) * k1.n()) + froude;
  const Rational alpha2 = Rational(static_cast<std::int64_t>(k2.n()) * k2.n()) + froude;
  const Rational alpha = Rational(static_cast<std::int64_t>(k.n()) * k.n()) + froude;

  // m1 D2 D + m2 D1 D - m D1 D2 with D_i = m_i^2 + alpha_i x.
  const Rational r0 = Rational(m1 * m2 * m2 * m * m + m2 * m1 * m1 * m * m - m * m1 * m1 * m2 * m2);
  const Rational r1 = Rational(m1) * (Rational(m2 * m2) * alpha + alpha2 * Rational(m * m)) +
                      Rational(m2) * (Rational(m1 * m1) * alpha + alpha1 * Rational(m * m)) -
                      Rational(m) * (Rational(m1 * m1) * alpha2 + alpha1 * Rational(m2 * m2));
  const Rational r2 = Rational(m1) * alpha2 * alpha + Rational(m2) * alpha1 * alpha - Rational(m) * alpha1 * alpha2;

  const BigInt den = boost::multiprecision::denominator(froude);
  const Rational scale(den * den);
  ChmResonancePolynomial p;
  const Rational s0 = r0 * scale, s1 = r1 * scale, s2 = r2 * scale;
  p.a0 = boost::multiprecision::numerator(s0);
  p.a1 = boost::multiprecision::numerator(s1);
  p.a2 = boost::multiprecision::numerator(s2);
  if (boost::multiprecision::denominator(s1) != 1 || boost::multiprecision::denominator(s2) != 1) {
    throw std::logic_error("resonance polynomial did not clear to integers");
  }
  const BigInt closed = m1 * m2 * m * (m1 * m1 + m2 * m2 + m1 * m2) * den * den;
  if (p.a0 != closed) throw std::logic_error("resonance polynomial constant term disagrees with closed form");
  return p;
}

std::vector<QuadraticSurd> ExceptionalSet::distinct_values() const {
  std::vector<QuadraticSurd> values;
  for (const auto& r : roots) values.push_back(r.rho_squared);
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return values;
}

bool ExceptionalSet::contains(const QuadraticSurd& rho_squared) const {
  return std::any_of(roots.begin(), roots.end(), [&](const ExceptionalRoot& r) { return r.rho_squared == rho_squared; });
}

ExceptionalSet exceptional_rhos(const Rational& froude, int cutoff) {
  if (froude < 0) throw std::invalid_argument("Froude number must be nonnegative");
  ExceptionalSet set;
  set.froude = froude;
  set.cutoff = cutoff;
  for_each_chm_pair(cutoff, [&](const WaveVector& k1, const WaveVector& k2, const WaveVector& k) {
    if (chm_case(k1, k2, k) != ResonanceKind::ChmCaseIV) return;
    const auto p = chm_resonance_polynomial(k1, k2, froude);
    auto add = [&](QuadraticSurd x) {
      if (x.sign() > 0) set.roots.push_back({std::move(x), k1, k2, k});
    };
    if (p.a2 == 0) {
      if (p.a1 != 0) add(QuadraticSurd(make_rational(-p.a0, p.a1)));
      return;
    }
    const BigInt disc = p.a1 * p.a1 - 4 * p.a2 * p.a0;
    if (disc < 0) return;
    const BigInt two_a2 = 2 * p.a2;
    const Rational centre = make_rational(-p.a1, two_a2);
    const Rational half = make_rational(1, two_a2);
    if (disc == 0) {
      add(QuadraticSurd(centre));
      return;
    }
    add(QuadraticSurd(centre, half, disc));
    add(QuadraticSurd(centre, -half, disc));
  });
  return set;
}

bool is_typical(const Rational& rho_squared, const Rational& froude, int cutoff) {
  bool typical = true;
  for_each_chm_pair(cutoff, [&](const WaveVector& k1, const WaveVector& k2, const WaveVector& k) {
    if (!typical || chm_case(k1, k2, k) != ResonanceKind::ChmCaseIV) return;
    const auto p = chm_resonance_polynomial(k1, k2, froude);
    if (Rational(p.a0) + Rational(p.a1) * rho_squared + Rational(p.a2) * rho_squared * rho_squared == 0) typical = false;
  });
  return typical;
}

std::size_t ClusterPartition::cluster_of(const WaveVector& k) const {
  if (!box_.contains(k)) throw CutoffMismatch(to_string(k) + " is outside the cluster box");
  return cluster_index_[box_.index(k)];
}

bool ClusterPartition::involves(std::size_t cluster, const WaveVector& k) const {
  const WaveVector key = identify_ ? conjugate_representative(k) : k;
  const auto& m = members_[cluster];
  const auto& c = catalysts_[cluster];
  return std::binary_search(m.begin(), m.end(), key) || std::binary_search(c.begin(), c.end(), key);
}

std::map<std::size_t, std::size_t> ClusterPartition::size_histogram() const {
  std::map<std::size_t, std::size_t> h;
  for (std::size_t c = 0; c < cluster_count(); ++c) ++h[cluster_size(c)];
  return h;
}

ClusterPartition clusters(const std::vector<ResonantTuple>& tuples, const LatticeBox& box,
                          const ClusterOptions& options) {
  const bool identify = options.identify_conjugates;
  auto canonical = [&](const WaveVector& k) {
    if (!box.contains(k)) throw CutoffMismatch("tuple member " + to_string(k) + " is outside the cutoff box");
    return box.index(identify ? conjugate_representative(k) : k);
  };

  std::vector<char> is_target(box.size(), 0);
  for (const auto& t : tuples)
    if (!t.vanishing_coefficient) is_target[canonical(t.target())] = 1;

  UnionFind uf(box.size());
  for (const auto& t : tuples) {
    if (t.vanishing_coefficient) continue;
    const std::size_t anchor = canonical(t.target());
    for (const auto* list : {&t.inputs, &t.outputs})
      for (const auto& v : *list)
        if (const std::size_t c = canonical(v); is_target[c]) uf.unite(anchor, c);
  }

  ClusterPartition part;
  part.box_ = box;
  part.identify_ = identify;
  part.cluster_index_.assign(box.size(), 0);
  std::vector<std::size_t> id_of_root(box.size(), static_cast<std::size_t>(-1));
  for (std::size_t i = 0; i < box.size(); ++i) {
    const WaveVector k = box.vector(i);
    if (identify && conjugate_representative(k) != k) continue;
    const std::size_t root = uf.find(i);
    if (id_of_root[root] == static_cast<std::size_t>(-1)) {
      id_of_root[root] = part.members_.size();
      part.members_.emplace_back();
      part.catalysts_.emplace_back();
    }
    part.members_[id_of_root[root]].push_back(k);
  }
  for (std::size_t i = 0; i < box.size(); ++i) {
    const std::size_t rep = identify ? box.index(conjugate_representative(box.vector(i))) : i;
    part.cluster_index_[i] = id_of_root[uf.find(rep)];
  }

  std::vector<std::set<WaveVector>> catalysts(part.members_.size());
  for (const auto& t : tuples) {
    if (t.vanishing_coefficient) continue;
    const std::size_t id = id_of_root[uf.find(canonical(t.target()))];
    for (const auto* list : {&t.inputs, &t.outputs})
      for (const auto& v : *list)
        if (const std::size_t c = canonical(v); !is_target[c]) catalysts[id].insert(box.vector(c));
  }
  for (std::size_t c = 0; c < catalysts.size(); ++c) {
    std::sort(part.members_[c].begin(), part.members_[c].end());
    part.catalysts_[c].assign(catalysts[c].begin(), catalysts[c].end());
  }
  return part;
}

}  // namespace effeq
