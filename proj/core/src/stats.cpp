#include "effeq/stats.hpp"

#include "effeq/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace effeq {

std::string to_string(const MomentIndex& index) {
  std::string s;
  for (const auto& k : index.upper) s += to_string(k);
  s += '|';
  for (const auto& k : index.lower) s += to_string(k);
  return s;
}

MomentIndex action_moment(const WaveVector& k) { return {{k}, {k}}; }

MomentIndex conjugate(const MomentIndex& index) { return {index.lower, index.upper}; }

MomentTable::MomentTable(LatticeBox box, std::vector<MomentIndex> indices, std::vector<MomentEstimate> estimates)
    : box_(std::move(box)), indices_(std::move(indices)), estimates_(std::move(estimates)) {
  if (indices_.size() != estimates_.size()) throw std::invalid_argument("moment table size mismatch");
  for (std::size_t i = 0; i < indices_.size(); ++i) lookup_.emplace(indices_[i], i);
}

bool MomentTable::contains(const MomentIndex& index) const { return lookup_.count(index) != 0; }

const MomentEstimate& MomentTable::at(const MomentIndex& index) const {
  auto it = lookup_.find(index);
  if (it == lookup_.end()) throw std::out_of_range("moment " + to_string(index) + " was not estimated");
  return estimates_[it->second];
}

Complex monomial(const ComplexVector& a, const LatticeBox& box, const MomentIndex& index) {
  Complex z = 1.0;
  for (const auto& k : index.upper) z *= a[box.index(k)];
  for (const auto& k : index.lower) z *= std::conj(a[box.index(k)]);
  return z;
}

MomentTable estimate_moments(const std::vector<ComplexVector>& samples, const LatticeBox& box,
                             const std::vector<MomentIndex>& indices) {
  if (indices.empty()) throw std::invalid_argument("moment index list is empty");
  if (samples.size() < 2) throw std::invalid_argument("moment estimation needs at least two samples");
  for (const auto& idx : indices) {
    for (const auto* list : {&idx.upper, &idx.lower})
      for (const auto& k : *list)
        if (!box.contains(k)) throw CutoffMismatch("moment index " + to_string(idx) + " leaves the cutoff box");
  }
  for (const auto& s : samples)
    if (s.size() != box.size()) throw CutoffMismatch("sample does not match the cutoff box");

  const double n = static_cast<double>(samples.size());
  std::vector<MomentEstimate> est;
  est.reserve(indices.size());
  for (const auto& idx : indices) {
    double sr = 0.0, si = 0.0, qr = 0.0, qi = 0.0;
    for (const auto& s : samples) {
      const Complex z = monomial(s, box, idx);
      sr += z.real();
      si += z.imag();
      qr += z.real() * z.real();
      qi += z.imag() * z.imag();
    }
    const double mr = sr / n;
    const double mi = si / n;
    const double vr = std::max(0.0, (qr - n * mr * mr) / (n - 1.0));
    const double vi = std::max(0.0, (qi - n * mi * mi) / (n - 1.0));
    est.push_back({Complex(mr, mi), std::sqrt(vr / n), std::sqrt(vi / n), samples.size()});
  }
  return MomentTable(box, indices, std::move(est));
}

namespace {

MomentIndex fourth_of(const ResonantTuple& t) {
  // M^{k1 k2}_{k k3}: inputs upper (sorted), target first in the lower slot.
  return {{t.inputs[0], t.inputs[1]}, {t.target(), t.outputs[0]}};
}

double nls_delta(const ModelParams& p) {
  const auto* nls = std::get_if<NlsModel>(&p.model);
  if (!nls) throw std::invalid_argument("moment chain checks are implemented for the NLS effective equation");
  return nls->delta;
}

// Ordered (j1, j2, j3) with j1 + j2 = j3 + target, resonant, trivial ones included.
std::vector<std::array<WaveVector, 3>> ordered_triples(const WaveVector& target, const LatticeBox& box,
                                                       const std::vector<ResonantTuple>& tuples) {
  std::vector<std::array<WaveVector, 3>> out;
  for (const auto& t : tuples) {
    if (t.target() != target) continue;
    out.push_back({t.inputs[0], t.inputs[1], t.outputs[0]});
    if (t.inputs[0] != t.inputs[1]) out.push_back({t.inputs[1], t.inputs[0], t.outputs[0]});
  }
  for (std::size_t i = 0; i < box.size(); ++i) {
    const WaveVector q = box.vector(i);
    out.push_back({target, q, q});
    if (q != target) out.push_back({q, target, q});
  }
  return out;
}

}  // namespace

std::vector<MomentIndex> chain2_indices(const std::vector<WaveVector>& modes, const std::vector<ResonantTuple>& tuples) {
  std::vector<MomentIndex> out;
  for (const auto& k : modes) {
    out.push_back(action_moment(k));
    for (const auto& t : tuples)
      if (t.target() == k) out.push_back(fourth_of(t));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<Chain2Residual> chain2_residual(const MomentTable& before, const MomentTable& at, const MomentTable& after,
                                            double h, const ModelParams& p, const std::vector<ResonantTuple>& tuples,
                                            const std::vector<WaveVector>& modes) {
  const double delta = nls_delta(p);
  if (!(h > 0.0)) throw std::invalid_argument("time spacing must be positive");
  const LatticeBox box = p.box();
  double gmax = 0.0;
  for (const auto& k : modes) gmax = std::max(gmax, p.damping[box.index(k)]);
  if (2.0 * gmax * h > 0.2) {
    throw std::invalid_argument("insufficient time resolution: 2 gamma h = " + std::to_string(2.0 * gmax * h) +
                                " exceeds 0.2");
  }

  std::vector<Chain2Residual> out;
  for (const auto& k : modes) {
    const std::size_t i = box.index(k);
    const auto m = action_moment(k);
    const double b = p.forcing_switch * p.forcing[i];
    Chain2Residual r;
    r.k = k;
    r.derivative = (after.at(m).value.real() - before.at(m).value.real()) / (2.0 * h);
    const double d_se = std::hypot(after.at(m).stderr_re, before.at(m).stderr_re) / (2.0 * h);
    r.rhs = -2.0 * p.damping[i] * at.at(m).value.real() + 2.0 * b * b;
    double se2 = d_se * d_se + std::pow(2.0 * p.damping[i] * at.at(m).stderr_re, 2);
    for (const auto& t : tuples) {
      if (t.target() != k) continue;
      const double mult = t.inputs[0] == t.inputs[1] ? 1.0 : 2.0;
      const auto& e = at.at(fourth_of(t));
      r.rhs -= 2.0 * delta * mult * e.value.imag();
      se2 += std::pow(2.0 * delta * mult * e.stderr_im, 2);
    }
    r.residual = r.derivative - r.rhs;
    r.stderr = std::sqrt(se2);
    out.push_back(r);
  }
  return out;
}

Complex ito_drift(const ComplexVector& a, const LatticeBox& box, const MomentIndex& index, const ComplexVector& resonant,
                  const ModelParams& p) {
  const std::size_t nu = index.upper.size();
  const std::size_t nl = index.lower.size();
  std::vector<Complex> factor(nu + nl);
  std::vector<Complex> drift(nu + nl);
  std::vector<std::size_t> id(nu + nl);
  for (std::size_t i = 0; i < nu + nl; ++i) {
    const bool up = i < nu;
    id[i] = box.index(up ? index.upper[i] : index.lower[i - nu]);
    const Complex d = resonant[id[i]] - p.damping[id[i]] * a[id[i]];
    factor[i] = up ? a[id[i]] : std::conj(a[id[i]]);
    drift[i] = up ? d : std::conj(d);
  }
  auto product_except = [&](std::size_t x, std::size_t y) {
    Complex z = 1.0;
    for (std::size_t i = 0; i < factor.size(); ++i)
      if (i != x && i != y) z *= factor[i];
    return z;
  };
  Complex total = 0.0;
  for (std::size_t i = 0; i < factor.size(); ++i) total += drift[i] * product_except(i, i);
  for (std::size_t i = 0; i < nu; ++i) {
    for (std::size_t j = nu; j < nu + nl; ++j) {
      if (id[i] != id[j]) continue;
      const double b = p.forcing_switch * p.forcing[id[i]];
      total += 2.0 * b * b * product_except(i, j);
    }
  }
  return total;
}

Chain4Check chain4_consistency(const std::vector<ComplexVector>& samples, const ModelParams& p,
                               const std::vector<ResonantTuple>& tuples, const MomentIndex& fourth) {
  const double delta = nls_delta(p);
  const LatticeBox box = p.box();
  if (box.cutoff() > 3) throw ResourceError("fourth-moment consistency check is limited to K <= 3");
  if (fourth.upper.size() != 2 || fourth.lower.size() != 2) throw std::invalid_argument("need a fourth-order index");
  const WaveVector& k1 = fourth.upper[0];
  const WaveVector& k2 = fourth.upper[1];
  const WaveVector& k = fourth.lower[0];
  const WaveVector& k3 = fourth.lower[1];
  {
    std::vector<WaveVector> all{k1, k2, k, k3};
    std::sort(all.begin(), all.end());
    if (std::adjacent_find(all.begin(), all.end()) != all.end())
      throw std::invalid_argument("fourth-moment indices must be pairwise distinct");
  }
  const EffectiveNonlinearity resonant(p, tuples);
  const auto t1 = ordered_triples(k1, box, tuples);
  const auto t2 = ordered_triples(k2, box, tuples);
  const auto tk = ordered_triples(k, box, tuples);
  const auto t3 = ordered_triples(k3, box, tuples);
  const double gamma_sum =
      p.damping[box.index(k1)] + p.damping[box.index(k2)] + p.damping[box.index(k)] + p.damping[box.index(k3)];
  const Complex i_delta(0.0, delta);

  Chain4Check check;
  const double n = static_cast<double>(samples.size());
  for (const auto& a : samples) {
    const Complex sample_drift = ito_drift(a, box, fourth, resonant(a), p);
    auto sixth = [&](const std::vector<WaveVector>& up, const std::vector<WaveVector>& lo) {
      return monomial(a, box, MomentIndex{up, lo});
    };
    Complex sum = 0.0;
    for (const auto& [j1, j2, j3] : t1) sum += sixth({j1, j2, k2}, {j3, k, k3});
    for (const auto& [j1, j2, j3] : t2) sum += sixth({j1, j2, k1}, {j3, k, k3});
    for (const auto& [j1, j2, j3] : tk) sum -= sixth({k1, k2, j3}, {j1, j2, k3});
    for (const auto& [j1, j2, j3] : t3) sum -= sixth({k1, k2, j3}, {j1, j2, k});
    const Complex explicit_drift = -gamma_sum * monomial(a, box, fourth) + i_delta * sum;
    check.sample_drift += sample_drift / n;
    check.explicit_drift += explicit_drift / n;
    check.max_abs_difference = std::max(check.max_abs_difference, std::abs(sample_drift - explicit_drift));
  }
  return check;
}

double quasi_gaussian_predict(const std::map<WaveVector, double>& second_moments, const MomentIndex& sextet) {
  if (sextet.upper.size() != 3 || sextet.lower.size() != 3) throw std::invalid_argument("need a sixth-order index");
  std::array<int, 3> perm{0, 1, 2};
  double total = 0.0;
  do {
    double term = 1.0;
    for (int i = 0; i < 3 && term != 0.0; ++i) {
      const auto& u = sextet.upper[static_cast<std::size_t>(i)];
      if (u != sextet.lower[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])]) {
        term = 0.0;
        break;
      }
      auto it = second_moments.find(u);
      if (it == second_moments.end()) throw std::out_of_range("no second moment for " + to_string(u));
      term *= it->second;
    }
    total += term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

Complex quasi_stationary_solve(Complex f, double gamma_sum) {
  if (!(gamma_sum > 0.0)) throw std::invalid_argument("damping sum must be positive");
  return f / gamma_sum;
}

}  // namespace effeq
