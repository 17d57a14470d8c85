#include "effeq/chm_cluster.hpp"

#include "effeq/random.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace effeq {

Coupling coupling(const WaveVector& k, const Rational& rho, const Rational& froude) {
  if (k.dim() != 2) throw std::invalid_argument("CHM coupling needs a 2d wave vector");
  const Rational rho2 = rho * rho;
  const Rational m(k.m());
  const Rational n(k.n());
  const Rational shape = 3 * n * n * rho2 - m * m;
  if (k.m() == 0 || k.n() == 0 || shape == 0) return {0.0, true};
  const Rational den = m * m + n * n * rho2 + froude * rho2;
  return {to_double(2 * m * n * shape / den), false};
}

double effective_coupling_factor(const Rational& rho) { return -1.0 / to_double(rho); }

ClosedFormResult closed_form(const Cluster3State& initial, double t) {
  const Complex z = initial.coupling * initial.a_c;
  const double r = std::abs(z);
  if (r == 0.0) return {initial, true};
  const Complex sgn = z / r;
  const double c = std::cos(r * t);
  const double s = std::sin(r * t);
  ClosedFormResult out{initial, false};
  out.state.a_k = initial.a_k * c + initial.a_kbar * sgn * s;
  // Swap k and kbar (A -> -A) and conjugate a_c.
  out.state.a_kbar = initial.a_kbar * c - initial.a_k * std::conj(sgn) * s;
  return out;
}

Cluster3State cluster_rhs(const Cluster3State& s) {
  Cluster3State d;
  d.coupling = s.coupling;
  d.a_k = s.coupling * s.a_c * s.a_kbar;
  d.a_kbar = -s.coupling * std::conj(s.a_c) * s.a_k;
  d.a_c = 0.0;
  return d;
}

double period(const Cluster3State& s) {
  const double r = std::abs(s.coupling * s.a_c);
  return r == 0.0 ? std::numeric_limits<double>::infinity() : 2.0 * std::numbers::pi / r;
}

ClusterMoments moment_ode(const ClusterMoments& m, const ClusterForcing& f) {
  ClusterMoments d;
  d.m_k = -2.0 * f.gamma_k * m.m_k + 2.0 * f.b_k * f.b_k;
  d.m_kbar = -2.0 * f.gamma_kbar * m.m_kbar + 2.0 * f.b_kbar * f.b_kbar;
  d.pair = d.m_k + d.m_kbar;
  d.catalyst = -2.0 * f.gamma_c * m.catalyst + 2.0 * f.b_c * f.b_c;
  return d;
}

ClusterMoments stationary_moments(const ClusterForcing& f) {
  ClusterMoments m;
  m.m_k = f.b_k * f.b_k / f.gamma_k;
  m.m_kbar = f.b_kbar * f.b_kbar / f.gamma_kbar;
  m.pair = (f.b_k * f.b_k + f.b_kbar * f.b_kbar) / f.gamma_k;
  m.catalyst = f.b_c * f.b_c / f.gamma_c;
  return m;
}

std::vector<Complex> ou_mode(Complex a0, double gamma, double b, double dt, std::size_t n_steps, std::uint64_t seed,
                             std::uint32_t stream) {
  if (!(gamma > 0.0)) throw std::invalid_argument("OU damping must be positive");
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  PhiloxEngine rng(seed, stream);
  const double decay = std::exp(-gamma * dt);
  const double sigma = b * std::sqrt(-std::expm1(-2.0 * gamma * dt) / (2.0 * gamma));
  std::vector<Complex> path(n_steps + 1);
  path[0] = a0;
  for (std::size_t i = 0; i < n_steps; ++i) {
    const double xr = rng.normal();
    const double xi = rng.normal();
    path[i + 1] = decay * path[i] + sigma * Complex(xr, xi);
  }
  return path;
}

}  // namespace effeq
