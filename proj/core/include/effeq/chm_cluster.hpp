#pragma once

#include "effeq/field.hpp"
#include "effeq/lattice.hpp"

#include <cstdint>
#include <vector>

namespace effeq {

struct Coupling {
  double value = 0.0;
  /// mn = 0 or 3 n^2 rho^2 = m^2: the mode's effective equation is linear.
  bool frozen = false;
};

/// A_k = 2 m n (3 n^2 rho^2 - m^2) / (m^2 + n^2 rho^2 + F rho^2), decided
/// exactly for the frozen cases.
Coupling coupling(const WaveVector& k, const Rational& rho, const Rational& froude);

/// Factor c with R_k = c * A_k * a_(0,2n) * a_(m,-n) for the resonant sum of
/// the CHM effective equation (the two orderings of the (iii-a) triad).
double effective_coupling_factor(const Rational& rho);

/// Modes k = (m, n), kbar = (m, -n) and the catalyst c = (0, 2n).
struct Cluster3State {
  Complex a_k;
  Complex a_kbar;
  Complex a_c;
  double coupling = 0.0;  // A_k
};

struct ClosedFormResult {
  Cluster3State state;
  /// a_c = 0 or A_k = 0: every mode is constant.
  bool frozen = false;
};

/// Periodic solution of da_k = A a_c a_kbar, da_kbar = -A conj(a_c) a_k, da_c = 0.
ClosedFormResult closed_form(const Cluster3State& initial, double t);

/// Time derivative of (a_k, a_kbar, a_c) under the same system.
Cluster3State cluster_rhs(const Cluster3State& s);

/// Period 2 pi / |A a_c| (infinite when frozen).
double period(const Cluster3State& s);

struct ClusterMoments {
  double pair = 0.0;      // M_k + M_kbar
  double m_k = 0.0;       // M_k (needed when gamma_k != gamma_kbar)
  double m_kbar = 0.0;
  double catalyst = 0.0;  // M_c
};

struct ClusterForcing {
  double gamma_k = 1.0, gamma_kbar = 1.0, gamma_c = 1.0;
  double b_k = 0.0, b_kbar = 0.0, b_c = 0.0;
};

/// Second-moment derivatives (M = E|a|^2, E|b dbeta|^2 = 2 b^2 dtau):
///   d(M_k + M_kbar) = -2 gamma_k M_k - 2 gamma_kbar M_kbar + 2 (b_k^2 + b_kbar^2)
///   dM_c            = -2 gamma_c M_c + 2 b_c^2
/// Fields m_k and m_kbar are carried with their single-mode parts
/// (-2 gamma M + 2 b^2); the Hamiltonian exchange only moves action between
/// them, so only the pair sum is exact.
ClusterMoments moment_ode(const ClusterMoments& m, const ClusterForcing& f);

/// Fixed point of moment_ode for gamma_k = gamma_kbar (pair) and the catalyst.
ClusterMoments stationary_moments(const ClusterForcing& f);

/// Exact Ornstein-Uhlenbeck path da = -gamma a dtau + b dbeta sampled on a
/// grid of n_steps steps of size dt (n_steps + 1 values).
std::vector<Complex> ou_mode(Complex a0, double gamma, double b, double dt, std::size_t n_steps, std::uint64_t seed,
                             std::uint32_t stream = 0);

}  // namespace effeq
