#pragma once

#include "effeq/lattice.hpp"
#include "effeq/resonance.hpp"

#include <complex>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace effeq {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

/// Cubic NLS: P_k = i delta sum v_k1 v_k2 conj(v_k3), k1 + k2 = k3 + k.
struct NlsModel {
  int dim = 2;
  Rational box_size{1};
  double delta = 1.0;
};

/// CHM on the rho x 1 torus; the field is real (v_{-k} = conj(v_k)).
struct ChmModel {
  Rational rho{1};
  Rational froude{0};
};

using Model = std::variant<NlsModel, ChmModel>;

std::string model_name(const Model& model);
int model_dim(const Model& model);
/// Degree q of the nonlinearity (3 for NLS, 2 for CHM).
int model_degree(const Model& model);
Dispersion model_dispersion(const Model& model);

/// How nu follows from epsilon. Cubic: nu = eps^2 (the NLS scaling);
/// General: nu = eps^q.
enum class NuConvention { Cubic, General };

double slow_time_parameter(double epsilon, int degree, NuConvention convention);

/// gamma_k or b_k as scale * max(|k|, 1)^exponent (exponent 0: constant).
struct Profile {
  double scale = 1.0;
  double exponent = 0.0;
};

std::vector<double> evaluate_profile(const Profile& profile, const LatticeBox& box);

struct ModelParams {
  Model model;
  int cutoff = 2;
  double epsilon = 0.1;
  double nu = 0.01;
  /// Forcing switch mu in {0, 1}.
  int forcing_switch = 0;
  /// Per box index.
  std::vector<double> damping;
  std::vector<double> forcing;

  LatticeBox box() const { return LatticeBox(model_dim(model), cutoff); }
  bool real_field() const { return std::holds_alternative<ChmModel>(model); }
  double min_damping() const;
  /// Throws std::invalid_argument on the first violated invariant.
  void validate() const;
};

ModelParams make_params(const Model& model, int cutoff, double nu, const Profile& damping, const Profile& forcing,
                        int forcing_switch = 0);

/// Amplitudes on the box, indexed densely by LatticeBox::index.
struct FieldState {
  LatticeBox box;
  bool real = false;
  double tau = 0.0;
  ComplexVector amp;

  FieldState() = default;
  FieldState(const LatticeBox& b, bool real_field) : box(b), real(real_field), amp(b.size()) {}

  Complex at(const WaveVector& k) const;
  /// Sets v_k; with the reality flag also sets v_{-k} = conj(z) (and keeps
  /// only the real part when k = -k).
  void set(const WaveVector& k, Complex z);
  /// Replaces each conjugate pair by the reality-consistent average.
  void enforce_reality();
  bool satisfies_reality(double tolerance = 0.0) const;
  double norm2() const;
};

FieldState zero_state(const ModelParams& p);

/// Dense omega_k as doubles.
std::vector<double> frequencies(const ModelParams& p);

/// Galerkin-truncated nonlinearity P(v) with all monomials inside the box.
ComplexVector nonlinearity(const ComplexVector& v, const ModelParams& p);

/// i nu^-1 omega_k v_k + P_k(v) - gamma_k v_k (forcing is left to the integrator).
FieldState original_rhs(const FieldState& v, double tau, const ModelParams& p);

/// a_k = exp(-i nu^-1 omega_k tau) v_k, and its inverse.
FieldState to_interaction(const FieldState& v, double tau, const ModelParams& p);
FieldState from_interaction(const FieldState& a, double tau, const ModelParams& p);

/// exp(-i omega tau / nu) P(exp(i omega tau / nu) a) - gamma a.
FieldState interaction_rhs(const FieldState& a, double tau, const ModelParams& p);

enum class TupleCheck {
  Resonant,  // every tuple must satisfy momentum and frequency matching
  Momentum,  // frequency matching not required (nonresonant monomials allowed)
};

/// Resonant part of the nonlinearity, assembled from a tuple list.
///
/// NLS: i delta [ a_k (2N - |a_k|^2) + 2 sum a_k1 a_k2 conj(a_k3) ] where the
/// first term collects the trivial tuples k1 = k, k2 = k3 (and swapped) in
/// closed form, N = sum |a_j|^2, and the sum runs over stored nontrivial
/// tuples with target k (the factor 2 is the two orderings of the inputs).
/// CHM: (1 / (rho D_k)) sum (m1 n2 - n1 m2)(w1 - w2) a_k1 a_k2 over stored
/// triads with target k, w = m^2 + n^2 rho^2, D_k = w_k + F rho^2.
class EffectiveNonlinearity {
 public:
  EffectiveNonlinearity() = default;
  EffectiveNonlinearity(const ModelParams& p, const std::vector<ResonantTuple>& tuples,
                        TupleCheck check = TupleCheck::Resonant);

  ComplexVector operator()(const ComplexVector& a) const;
  const LatticeBox& box() const { return box_; }
  std::size_t term_count() const { return cubic_.size() + quadratic_.size(); }

 private:
  struct CubicTerm {
    std::uint32_t target, i1, i2, i3;
    Complex coef;
  };
  struct QuadraticTerm {
    std::uint32_t target, i1, i2;
    Complex coef;
  };

  LatticeBox box_;
  std::string model_;
  bool nls_diagonal_ = false;
  double delta_ = 0.0;
  std::vector<CubicTerm> cubic_;
  std::vector<QuadraticTerm> quadratic_;
};

/// R_k(a) - gamma_k a_k.
FieldState effective_rhs(const FieldState& a, const ModelParams& p, const EffectiveNonlinearity& resonant);
FieldState effective_rhs(const FieldState& a, const ModelParams& p, const std::vector<ResonantTuple>& tuples);

/// Re sum_k P_k(v) conj(v_k).
double dissipation_sign(const FieldState& v, const ModelParams& p);
/// Re sum_k D_k P_k(v) conj(v_k) with D_k = m^2 + n^2 rho^2 + F rho^2 for CHM
/// (the pairing the CHM nonlinearity conserves) and D_k = 1 for NLS.
double weighted_dissipation(const FieldState& v, const ModelParams& p);

/// Wave action I_k = |v_k|^2 / 2.
inline double action(Complex z) { return 0.5 * std::norm(z); }

}  // namespace effeq
