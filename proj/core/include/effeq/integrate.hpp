#pragma once

#include "effeq/errors.hpp"
#include "effeq/field.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace effeq {

/// du_k/dtau = L_k u_k + N_k(u, tau) + f_k dbeta_k/dtau, with L diagonal.
struct SemilinearSystem {
  LatticeBox box;
  bool real = false;
  ComplexVector linear;
  std::function<ComplexVector(const ComplexVector&, double)> nonlinear;
  /// mu * b_k per mode; all zero for deterministic runs.
  std::vector<double> forcing;

  bool stochastic() const;
};

/// v-variables: L = i omega / nu - gamma, N = P(v).
SemilinearSystem original_system(const ModelParams& p);
/// a-variables of the interaction representation: L = -gamma,
/// N = exp(-i omega tau / nu) P(exp(i omega tau / nu) a).
SemilinearSystem interaction_system(const ModelParams& p);
/// Effective equation: L = -gamma, N = resonant part.
SemilinearSystem effective_system(const ModelParams& p, EffectiveNonlinearity resonant);

enum class Scheme {
  ExponentialEuler,     // exact linear flow + exact OU noise, explicit nonlinearity
  Rk4,                  // classical RK4 on the full right-hand side, deterministic
  IntegratingFactorRk4, // RK4 in the frame rotating with exp(L tau), deterministic
  Splitting,            // Strang: half OU step, RK4 nonlinear step, half OU step
};

std::string to_string(Scheme scheme);
Scheme parse_scheme(const std::string& name);

struct IntegratorConfig {
  Scheme scheme = Scheme::ExponentialEuler;
  double dt = 1e-3;
  double t_final = 1.0;
  std::size_t record_stride = 100;

  std::uint64_t step_count() const;
};

struct NoiseConfig {
  std::uint64_t seed = 0;
  std::uint32_t trajectory = 0;
};

/// Largest dt * |L_k| accepted by the plain RK4 scheme.
inline constexpr double kRk4StabilityLimit = 2.8;

/// One step from tau to tau + dt. `step` addresses the noise stream.
/// Throws StepSizeError if dt violates the scheme's stability bound and
/// std::invalid_argument if a deterministic scheme is given a forced system.
void step(const SemilinearSystem& sys, Scheme scheme, ComplexVector& u, double tau, double dt, std::uint64_t step_index,
          const NoiseConfig& noise);

/// Checks the scheme/system/dt combination once, without stepping.
void check_step(const SemilinearSystem& sys, Scheme scheme, double dt);

/// Raised when the state stops being finite; carries the last finite state.
class SimulationFailure : public NumericError {
 public:
  SimulationFailure(const std::string& what, FieldState last_good)
      : NumericError(what), last_good_(std::move(last_good)) {}
  const FieldState& last_good() const { return last_good_; }

 private:
  FieldState last_good_;
};

struct Trajectory {
  std::vector<FieldState> records;
};

/// Integrates from initial.tau for config.t_final, recording the initial state
/// and every record_stride steps (floor(steps / stride) + 1 records).
Trajectory simulate(const FieldState& initial, const SemilinearSystem& sys, const IntegratorConfig& config,
                    const NoiseConfig& noise);

struct EnsembleOptions {
  std::size_t trajectories = 1;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  /// Keep every recorded state of every trajectory (needed for moments).
  bool keep_states = false;
};

struct EnsembleResult {
  std::vector<double> times;
  /// [record][mode] mean and unbiased variance of I_k over trajectories.
  std::vector<std::vector<double>> mean_action;
  std::vector<std::vector<double>> var_action;
  std::size_t trajectories = 0;
  /// [trajectory][record], filled when keep_states is set.
  std::vector<std::vector<ComplexVector>> states;

  /// Standard error of mean_action at one record.
  std::vector<double> stderr_action(std::size_t record) const;
};

/// Runs independent trajectories (trajectory id = position, noise seeded by
/// options.seed). `initials` holds one state shared by all trajectories or one
/// per trajectory. Reduction order is fixed, so results do not depend on the
/// worker count.
EnsembleResult ensemble(const std::vector<FieldState>& initials, const SemilinearSystem& sys,
                        const IntegratorConfig& config, const EnsembleOptions& options);

}  // namespace effeq
