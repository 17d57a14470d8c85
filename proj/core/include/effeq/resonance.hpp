#pragma once

#include "effeq/lattice.hpp"
#include "effeq/rational.hpp"

#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace effeq {

enum class ResonanceKind {
  NlsQuadruple,
  ChmCaseI,     // m1 = m2 = m = 0; coefficient vanishes
  ChmCaseIIIa,  // exactly one of m1, m2 vanishes
  ChmCaseIIIb,  // m = 0, m1 = -m2 != 0
  ChmCaseIV,    // m1 m2 m != 0 (non-standard, rho dependent)
};

std::string to_string(ResonanceKind kind);

/// One resonance (k_1..k_p ; k_{p+1}..k_q, k). Input slots are symmetric and
/// stored sorted; the target mode k is the last output.
struct ResonantTuple {
  std::vector<WaveVector> inputs;
  std::vector<WaveVector> outputs;
  ResonanceKind kind = ResonanceKind::NlsQuadruple;
  /// Set when the symmetrized interaction coefficient is zero (CHM cases (i),
  /// and the degenerate (iii) solutions). Such tuples are kept for reporting
  /// but are not resonances in the strict sense.
  bool vanishing_coefficient = false;

  const WaveVector& target() const { return outputs.back(); }

  friend bool operator==(const ResonantTuple&, const ResonantTuple&) = default;
  friend auto operator<=>(const ResonantTuple& a, const ResonantTuple& b) {
    if (auto c = a.outputs <=> b.outputs; c != 0) return c;
    return a.inputs <=> b.inputs;
  }
};

/// Tuples with a nonzero coefficient.
std::vector<ResonantTuple> active_tuples(const std::vector<ResonantTuple>& tuples);

struct EnumerationBudget {
  /// Upper bound on the number of lattice pairs held in memory.
  std::size_t max_pairs = 40'000'000;
};

enum class FrequencyFilter {
  Resonant,  // momentum and frequency matching
  All,       // momentum matching only (nonresonant monomials included)
};

/// All nontrivial quadruples {k1, k2; k3, k} in the box with k1 + k2 = k3 + k
/// and |k1|^2 + |k2|^2 = |k3|^2 + |k|^2. Inputs are unordered, outputs ordered.
/// Throws ResourceError when the pair table would exceed the budget.
std::vector<ResonantTuple> enumerate_nls_quadruples(int dim, int cutoff, const EnumerationBudget& budget = {},
                                                    FrequencyFilter filter = FrequencyFilter::Resonant);

/// Vertex order (k, k1, k2, k3): parallelogram k1 - k = k3 - k2 with a right
/// angle at k3.
bool is_rectangle(const std::array<WaveVector, 4>& quad);

/// All CHM triads k1 + k2 = k in the box solving the resonance equations for
/// the given rho^2 and Froude number, labelled by case.
std::vector<ResonantTuple> enumerate_chm_triads(const Rational& rho_squared, const Rational& froude, int cutoff);

/// Integer coefficients of a0 + a1 x + a2 x^2 = 0 (x = rho^2) obtained by
/// clearing denominators in the CHM frequency condition for a triad with
/// k1 + k2 = k.
struct ChmResonancePolynomial {
  BigInt a0;
  BigInt a1;
  BigInt a2;
};

ChmResonancePolynomial chm_resonance_polynomial(const WaveVector& k1, const WaveVector& k2, const Rational& froude);

struct ExceptionalRoot {
  QuadraticSurd rho_squared;
  WaveVector k1;
  WaveVector k2;
  WaveVector k;
};

/// Positive rho^2 values for which some case-(iv) triad in the box resonates.
struct ExceptionalSet {
  Rational froude;
  int cutoff = 0;
  std::vector<ExceptionalRoot> roots;

  /// Sorted, deduplicated root values.
  std::vector<QuadraticSurd> distinct_values() const;
  bool contains(const QuadraticSurd& rho_squared) const;
};

ExceptionalSet exceptional_rhos(const Rational& froude, int cutoff);

/// rho^2 admits no case-(iv) resonance inside the box.
bool is_typical(const Rational& rho_squared, const Rational& froude, int cutoff);

struct ClusterOptions {
  /// Identify k with -k before partitioning (real fields, CHM).
  bool identify_conjugates = false;
};

/// Partition of the box into resonance clusters.
///
/// Vectors linked by a chain of active tuples share a cluster. A mode that is
/// never the target of an active tuple has no nonlinear term in its own
/// effective equation; it is kept as its own singleton and recorded as a
/// catalyst of every cluster it drives instead of being merged into them.
class ClusterPartition {
 public:
  const LatticeBox& box() const { return box_; }
  bool conjugates_identified() const { return identify_; }

  std::size_t cluster_count() const { return members_.size(); }
  std::size_t cluster_of(const WaveVector& k) const;

  /// Canonical members (conjugate representatives when identified).
  const std::vector<WaveVector>& members(std::size_t cluster) const { return members_[cluster]; }
  const std::vector<WaveVector>& catalysts(std::size_t cluster) const { return catalysts_[cluster]; }
  /// members + catalysts.
  std::size_t cluster_size(std::size_t cluster) const {
    return members_[cluster].size() + catalysts_[cluster].size();
  }
  /// True if k (or -k when identified) is a member or catalyst of the cluster.
  bool involves(std::size_t cluster, const WaveVector& k) const;
  /// Histogram: cluster size -> number of clusters.
  std::map<std::size_t, std::size_t> size_histogram() const;

 private:
  friend ClusterPartition clusters(const std::vector<ResonantTuple>&, const LatticeBox&, const ClusterOptions&);

  LatticeBox box_;
  bool identify_ = false;
  std::vector<std::size_t> cluster_index_;  // per box index
  std::vector<std::vector<WaveVector>> members_;
  std::vector<std::vector<WaveVector>> catalysts_;
};

/// Union-find over the box. Tuples flagged vanishing_coefficient are ignored.
ClusterPartition clusters(const std::vector<ResonantTuple>& tuples, const LatticeBox& box,
                          const ClusterOptions& options = {});

}  // namespace effeq
