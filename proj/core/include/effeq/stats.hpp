#pragma once

#include "effeq/field.hpp"
#include "effeq/resonance.hpp"

#include <map>
#include <string>
#include <vector>

namespace effeq {

/// Moment E[ a_u1 ... a_up conj(a_l1) ... conj(a_lq) ].
struct MomentIndex {
  std::vector<WaveVector> upper;
  std::vector<WaveVector> lower;

  friend bool operator==(const MomentIndex&, const MomentIndex&) = default;
  friend auto operator<=>(const MomentIndex& a, const MomentIndex& b) {
    if (auto c = a.upper <=> b.upper; c != 0) return c;
    return a.lower <=> b.lower;
  }
};

/// "(1,0)(0,1)|(1,1)(0,0)" (upper | lower).
std::string to_string(const MomentIndex& index);
/// Second moment E|a_k|^2.
MomentIndex action_moment(const WaveVector& k);
/// Index with upper and lower swapped (complex-conjugate moment).
MomentIndex conjugate(const MomentIndex& index);

struct MomentEstimate {
  Complex value;
  double stderr_re = 0.0;
  double stderr_im = 0.0;
  std::size_t n = 0;
};

class MomentTable {
 public:
  MomentTable() = default;
  MomentTable(LatticeBox box, std::vector<MomentIndex> indices, std::vector<MomentEstimate> estimates);

  const LatticeBox& box() const { return box_; }
  const std::vector<MomentIndex>& indices() const { return indices_; }
  const std::vector<MomentEstimate>& estimates() const { return estimates_; }
  bool contains(const MomentIndex& index) const;
  /// Throws std::out_of_range if the index was not estimated.
  const MomentEstimate& at(const MomentIndex& index) const;

 private:
  LatticeBox box_;
  std::vector<MomentIndex> indices_;
  std::vector<MomentEstimate> estimates_;
  std::map<MomentIndex, std::size_t> lookup_;
};

/// Sample value of the monomial for one state.
Complex monomial(const ComplexVector& a, const LatticeBox& box, const MomentIndex& index);

/// Sample means over `samples` (one amplitude vector per trajectory) with
/// standard errors. Needs at least two samples and a nonempty index list.
MomentTable estimate_moments(const std::vector<ComplexVector>& samples, const LatticeBox& box,
                             const std::vector<MomentIndex>& indices);

/// Moments that enter the second-moment equation of each k: E|a_k|^2 and
/// M^{k1 k2}_{k k3} for every stored resonant tuple with target k.
std::vector<MomentIndex> chain2_indices(const std::vector<WaveVector>& modes, const std::vector<ResonantTuple>& tuples);

struct Chain2Residual {
  WaveVector k;
  double derivative = 0.0;  // centred difference of E|a_k|^2
  double rhs = 0.0;         // -2 gamma M + 2 b^2 - 2 delta sum Im M^{k1k2}_{k k3}
  double residual = 0.0;    // derivative - rhs
  double stderr = 0.0;      // conservative (independent-error) combination
};

/// Residual of dM_k^k/dtau = -2 gamma_k M_k^k + 2 mu b_k^2
///   - 2 delta sum_{ordered resonant (k1,k2,k3)} Im M^{k1 k2}_{k k3}
/// for the NLS effective equation, with M from tables at tau - h, tau, tau + h.
/// Only nontrivial tuples contribute (trivial moments are real). Throws
/// std::invalid_argument if 2 gamma_max h > 0.2 (time resolution too coarse)
/// or a needed moment is missing.
std::vector<Chain2Residual> chain2_residual(const MomentTable& before, const MomentTable& at, const MomentTable& after,
                                            double h, const ModelParams& p, const std::vector<ResonantTuple>& tuples,
                                            const std::vector<WaveVector>& modes);

/// Ito drift of the monomial for du = (R(u) - gamma u) dtau + mu b dbeta on a
/// complex (non-real) field, with E|b dbeta|^2 = 2 b^2 dtau.
Complex ito_drift(const ComplexVector& a, const LatticeBox& box, const MomentIndex& index, const ComplexVector& resonant,
                  const ModelParams& p);

struct Chain4Check {
  Complex sample_drift;    // mean Ito drift of a_k1 a_k2 conj(a_k) conj(a_k3)
  Complex explicit_drift;  // -(sum gamma) M + i delta (sixth-moment sums)
  double max_abs_difference = 0.0;
};

/// Compares, on the given samples, the Ito drift of M^{k1 k2}_{k k3} computed
/// from the resonant right-hand side against the explicit fourth-moment
/// equation written through sixth-order moments. Indices must be pairwise
/// distinct (no Ito correction). Intended for K <= 3.
Chain4Check chain4_consistency(const std::vector<ComplexVector>& samples, const ModelParams& p,
                               const std::vector<ResonantTuple>& tuples, const MomentIndex& fourth);

/// Wick value of M^{l1 l2 l3}_{l4 l5 l6} for independent complex Gaussians:
/// sum over the 3! matchings of lower to upper indices of products of
/// second moments (a matching contributes only if matched vectors agree).
double quasi_gaussian_predict(const std::map<WaveVector, double>& second_moments, const MomentIndex& sextet);

/// Quasi-stationary fourth moment f / (gamma_k + gamma_k1 + gamma_k2 + gamma_k3).
Complex quasi_stationary_solve(Complex f, double gamma_sum);

}  // namespace effeq
