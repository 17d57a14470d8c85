#include "effeq/integrate.hpp"

#include "effeq/random.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace effeq {

bool SemilinearSystem::stochastic() const {
  return std::any_of(forcing.begin(), forcing.end(), [](double f) { return f != 0.0; });
}

namespace {

std::vector<double> scaled_forcing(const ModelParams& p) {
  std::vector<double> f(p.forcing.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = p.forcing_switch * p.forcing[i];
  return f;
}

ComplexVector damping_only(const ModelParams& p) {
  ComplexVector l(p.damping.size());
  for (std::size_t i = 0; i < l.size(); ++i) l[i] = -p.damping[i];
  return l;
}

void mirror_if_real(const SemilinearSystem& sys, ComplexVector& u) {
  if (!sys.real) return;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const std::size_t j = sys.box.index_of_negative(i);
    if (j < i) continue;
    if (i == j) u[i] = u[i].real();
    else u[j] = std::conj(u[i]);
  }
}

Complex phi1(Complex z) {
  if (std::abs(z) < 1e-3) return 1.0 + z * (0.5 + z * (1.0 / 6.0 + z * (1.0 / 24.0 + z / 120.0)));
  return (std::exp(z) - 1.0) / z;
}

// Adds the OU noise accumulated over h: sigma (xi+ + i xi-) with
// sigma^2 = f^2 (1 - exp(-2 gamma h)) / (2 gamma), gamma = -Re L.
void add_noise(const SemilinearSystem& sys, ComplexVector& u, double h, std::uint64_t step_index,
               std::uint32_t substep, const NoiseConfig& noise) {
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double f = sys.forcing[i];
    if (f == 0.0) continue;
    const std::size_t j = sys.box.index_of_negative(i);
    if (sys.real && j < i) continue;
    const double g = -sys.linear[i].real();
    const double var = g > 0.0 ? -std::expm1(-2.0 * g * h) / (2.0 * g) : h;
    const double sigma = f * std::sqrt(var);
    const auto xi = noise_pair(noise.seed, noise.trajectory, static_cast<std::uint32_t>(i), step_index, substep);
    if (sys.real && i == j) {
      u[i] += sigma * xi[0];
    } else {
      u[i] += sigma * Complex(xi[0], xi[1]);
      if (sys.real) u[j] += sigma * Complex(xi[0], -xi[1]);
    }
  }
}

// Exact linear + noise flow over h.
void ou_flow(const SemilinearSystem& sys, ComplexVector& u, double h, std::uint64_t step_index, std::uint32_t substep,
             const NoiseConfig& noise) {
  for (std::size_t i = 0; i < u.size(); ++i) u[i] *= std::exp(sys.linear[i] * h);
  if (sys.stochastic()) add_noise(sys, u, h, step_index, substep, noise);
}

void axpy(ComplexVector& out, const ComplexVector& x, Complex a, const ComplexVector& y) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] + a * y[i];
}

ComplexVector full_rhs(const SemilinearSystem& sys, const ComplexVector& u, double tau) {
  ComplexVector r = sys.nonlinear(u, tau);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += sys.linear[i] * u[i];
  return r;
}

// Classical RK4 for du/dtau = F(u, tau).
template <typename F>
void rk4(ComplexVector& u, double tau, double h, F&& rhs) {
  const std::size_t n = u.size();
  ComplexVector tmp(n);
  const ComplexVector k1 = rhs(u, tau);
  axpy(tmp, u, 0.5 * h, k1);
  const ComplexVector k2 = rhs(tmp, tau + 0.5 * h);
  axpy(tmp, u, 0.5 * h, k2);
  const ComplexVector k3 = rhs(tmp, tau + 0.5 * h);
  axpy(tmp, u, h, k3);
  const ComplexVector k4 = rhs(tmp, tau + h);
  for (std::size_t i = 0; i < n; ++i) u[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

void lawson_rk4(const SemilinearSystem& sys, ComplexVector& u, double tau, double h) {
  const std::size_t n = u.size();
  ComplexVector half(n), full(n);
  for (std::size_t i = 0; i < n; ++i) {
    half[i] = std::exp(sys.linear[i] * (0.5 * h));
    full[i] = std::exp(sys.linear[i] * h);
  }
  ComplexVector tmp(n);
  const ComplexVector k1 = sys.nonlinear(u, tau);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = half[i] * (u[i] + 0.5 * h * k1[i]);
  const ComplexVector k2 = sys.nonlinear(tmp, tau + 0.5 * h);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = half[i] * u[i] + 0.5 * h * k2[i];
  const ComplexVector k3 = sys.nonlinear(tmp, tau + 0.5 * h);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = full[i] * u[i] + h * half[i] * k3[i];
  const ComplexVector k4 = sys.nonlinear(tmp, tau + h);
  for (std::size_t i = 0; i < n; ++i)
    u[i] = full[i] * u[i] + (h / 6.0) * (full[i] * k1[i] + 2.0 * half[i] * (k2[i] + k3[i]) + k4[i]);
}

bool all_finite(const ComplexVector& u) {
  return std::all_of(u.begin(), u.end(), [](Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

}  // namespace

SemilinearSystem original_system(const ModelParams& p) {
  p.validate();
  SemilinearSystem sys;
  sys.box = p.box();
  sys.real = p.real_field();
  const auto w = frequencies(p);
  sys.linear.resize(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) sys.linear[i] = Complex(-p.damping[i], w[i] / p.nu);
  sys.nonlinear = [p](const ComplexVector& v, double) { return nonlinearity(v, p); };
  sys.forcing = scaled_forcing(p);
  return sys;
}

SemilinearSystem interaction_system(const ModelParams& p) {
  p.validate();
  SemilinearSystem sys;
  sys.box = p.box();
  sys.real = p.real_field();
  sys.linear = damping_only(p);
  sys.nonlinear = [p, w = frequencies(p)](const ComplexVector& a, double tau) {
    const std::size_t n = a.size();
    ComplexVector v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = std::polar(1.0, w[i] * tau / p.nu) * a[i];
    ComplexVector r = nonlinearity(v, p);
    for (std::size_t i = 0; i < n; ++i) r[i] *= std::polar(1.0, -w[i] * tau / p.nu);
    return r;
  };
  sys.forcing = scaled_forcing(p);
  return sys;
}

SemilinearSystem effective_system(const ModelParams& p, EffectiveNonlinearity resonant) {
  p.validate();
  if (resonant.box() != p.box()) throw CutoffMismatch("resonance table was built for a different cutoff");
  SemilinearSystem sys;
  sys.box = p.box();
  sys.real = p.real_field();
  sys.linear = damping_only(p);
  sys.nonlinear = [r = std::move(resonant)](const ComplexVector& a, double) { return r(a); };
  sys.forcing = scaled_forcing(p);
  return sys;
}

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::ExponentialEuler: return "exponential-euler";
    case Scheme::Rk4: return "rk4";
    case Scheme::IntegratingFactorRk4: return "if-rk4";
    case Scheme::Splitting: return "splitting";
  }
  return "unknown";
}

Scheme parse_scheme(const std::string& name) {
  for (Scheme s : {Scheme::ExponentialEuler, Scheme::Rk4, Scheme::IntegratingFactorRk4, Scheme::Splitting})
    if (to_string(s) == name) return s;
  throw std::invalid_argument("unknown scheme '" + name + "'");
}

std::uint64_t IntegratorConfig::step_count() const {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(t_final >= 0.0)) throw std::invalid_argument("t_final must be nonnegative");
  return static_cast<std::uint64_t>(std::floor(t_final / dt + 1e-9));
}

void check_step(const SemilinearSystem& sys, Scheme scheme, double dt) {
  if (!(dt > 0.0)) throw StepSizeError("dt must be positive");
  if (sys.linear.size() != sys.box.size() || sys.forcing.size() != sys.box.size())
    throw CutoffMismatch("system tables do not match the lattice box");
  const bool deterministic_only = scheme == Scheme::Rk4 || scheme == Scheme::IntegratingFactorRk4;
  if (deterministic_only && sys.stochastic())
    throw std::invalid_argument(to_string(scheme) + " is deterministic; use exponential-euler or splitting with forcing");
  if (scheme == Scheme::Rk4) {
    double lmax = 0.0;
    for (const auto& l : sys.linear) lmax = std::max(lmax, std::abs(l));
    if (dt * lmax > kRk4StabilityLimit) {
      throw StepSizeError("rk4 needs dt * max|L| <= " + std::to_string(kRk4StabilityLimit) + " (got " +
                          std::to_string(dt * lmax) + "); use an exponential scheme for fast rotation");
    }
  }
}

void step(const SemilinearSystem& sys, Scheme scheme, ComplexVector& u, double tau, double dt,
          std::uint64_t step_index, const NoiseConfig& noise) {
  check_step(sys, scheme, dt);
  switch (scheme) {
    case Scheme::ExponentialEuler: {
      const ComplexVector nl = sys.nonlinear(u, tau);
      for (std::size_t i = 0; i < u.size(); ++i) {
        const Complex z = sys.linear[i] * dt;
        u[i] = std::exp(z) * u[i] + dt * phi1(z) * nl[i];
      }
      if (sys.stochastic()) add_noise(sys, u, dt, step_index, 0, noise);
      break;
    }
    case Scheme::Rk4:
      rk4(u, tau, dt, [&](const ComplexVector& x, double t) { return full_rhs(sys, x, t); });
      break;
    case Scheme::IntegratingFactorRk4:
      lawson_rk4(sys, u, tau, dt);
      break;
    case Scheme::Splitting:
      ou_flow(sys, u, 0.5 * dt, step_index, 0, noise);
      rk4(u, tau, dt, [&](const ComplexVector& x, double t) { return sys.nonlinear(x, t); });
      ou_flow(sys, u, 0.5 * dt, step_index, 1, noise);
      break;
  }
  mirror_if_real(sys, u);
}

Trajectory simulate(const FieldState& initial, const SemilinearSystem& sys, const IntegratorConfig& config,
                    const NoiseConfig& noise) {
  if (initial.box != sys.box) throw CutoffMismatch("initial state does not match the system box");
  if (config.record_stride == 0) throw std::invalid_argument("record_stride must be positive");
  const std::uint64_t steps = config.step_count();
  check_step(sys, config.scheme, config.dt);

  Trajectory traj;
  traj.records.reserve(steps / config.record_stride + 1);
  FieldState state = initial;
  state.real = sys.real;
  traj.records.push_back(state);
  const double tau0 = initial.tau;
  for (std::uint64_t s = 0; s < steps; ++s) {
    const double tau = tau0 + static_cast<double>(s) * config.dt;
    ComplexVector next = state.amp;
    step(sys, config.scheme, next, tau, config.dt, s, noise);
    if (!all_finite(next)) {
      throw SimulationFailure("non-finite amplitude at step " + std::to_string(s + 1) + " (tau = " +
                                  std::to_string(tau + config.dt) + ")",
                              state);
    }
    state.amp = std::move(next);
    state.tau = tau0 + static_cast<double>(s + 1) * config.dt;
    if ((s + 1) % config.record_stride == 0) traj.records.push_back(state);
  }
  return traj;
}

std::vector<double> EnsembleResult::stderr_action(std::size_t record) const {
  std::vector<double> se(var_action.at(record).size());
  for (std::size_t i = 0; i < se.size(); ++i) se[i] = std::sqrt(var_action[record][i] / static_cast<double>(trajectories));
  return se;
}

EnsembleResult ensemble(const std::vector<FieldState>& initials, const SemilinearSystem& sys,
                        const IntegratorConfig& config, const EnsembleOptions& options) {
  const std::size_t n_traj = options.trajectories;
  if (n_traj == 0) throw std::invalid_argument("ensemble needs at least one trajectory");
  if (initials.size() != 1 && initials.size() != n_traj)
    throw std::invalid_argument("initials must hold one state or one per trajectory");
  if (config.record_stride == 0) throw std::invalid_argument("record_stride must be positive");
  check_step(sys, config.scheme, config.dt);

  const std::size_t n_records = config.step_count() / config.record_stride + 1;
  const std::size_t n_modes = sys.box.size();
  constexpr std::size_t kBlock = 32;
  const std::size_t n_blocks = (n_traj + kBlock - 1) / kBlock;

  struct Partial {
    std::vector<double> sum, sumsq;  // [record * n_modes + mode]
  };
  std::vector<Partial> partial(n_blocks);
  EnsembleResult result;
  result.trajectories = n_traj;
  if (options.keep_states) result.states.resize(n_traj);
  std::vector<double> times;

  std::atomic<std::size_t> next_block{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t b = next_block.fetch_add(1);
      if (b >= n_blocks) return;
      Partial acc{std::vector<double>(n_records * n_modes), std::vector<double>(n_records * n_modes)};
      try {
        for (std::size_t t = b * kBlock; t < std::min(n_traj, (b + 1) * kBlock); ++t) {
          const FieldState& init = initials.size() == 1 ? initials.front() : initials[t];
          const Trajectory traj =
              simulate(init, sys, config, NoiseConfig{options.seed, static_cast<std::uint32_t>(t)});
          for (std::size_t r = 0; r < n_records; ++r) {
            for (std::size_t i = 0; i < n_modes; ++i) {
              const double I = action(traj.records[r].amp[i]);
              acc.sum[r * n_modes + i] += I;
              acc.sumsq[r * n_modes + i] += I * I;
            }
          }
          if (options.keep_states) {
            auto& dst = result.states[t];
            dst.reserve(n_records);
            for (const auto& rec : traj.records) dst.push_back(rec.amp);
          }
          if (t == 0) {
            for (const auto& rec : traj.records) times.push_back(rec.tau);
          }
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next_block = n_blocks;
        return;
      }
      partial[b] = std::move(acc);
    }
  };

  const unsigned n_workers = std::max(1u, std::min<unsigned>(options.workers, static_cast<unsigned>(n_blocks)));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<double> sum(n_records * n_modes), sumsq(n_records * n_modes);
  for (const auto& p : partial) {
    for (std::size_t i = 0; i < sum.size(); ++i) {
      sum[i] += p.sum[i];
      sumsq[i] += p.sumsq[i];
    }
  }
  result.times = std::move(times);
  result.mean_action.assign(n_records, std::vector<double>(n_modes));
  result.var_action.assign(n_records, std::vector<double>(n_modes));
  const double n = static_cast<double>(n_traj);
  for (std::size_t r = 0; r < n_records; ++r) {
    for (std::size_t i = 0; i < n_modes; ++i) {
      const double mean = sum[r * n_modes + i] / n;
      result.mean_action[r][i] = mean;
      result.var_action[r][i] =
          n_traj > 1 ? std::max(0.0, (sumsq[r * n_modes + i] - n * mean * mean) / (n - 1.0)) : 0.0;
    }
  }
  return result;
}

}  // namespace effeq
