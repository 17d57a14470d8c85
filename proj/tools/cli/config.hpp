#pragma once

#include "effeq/field.hpp"
#include "effeq/integrate.hpp"
#include "effeq/kinetic.hpp"

#include <json.hpp>

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace effeq::cli {

/// Invalid configuration; `path` is the JSON pointer of the offending field.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(const std::string& path, const std::string& message)
      : std::invalid_argument(path + ": " + message), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

enum class Command { Resonances, Clusters, Simulate, ChmOracle, Kinetic, Moments };

std::string to_string(Command c);
/// Throws ConfigError (path "/subcommand") for an unknown name.
Command parse_command(const std::string& name);

struct ModelBlock {
  std::string type = "nls";  // "nls" or "chm"
  int dim = 2;
  std::string box_size = "1";
  double delta = 1.0;
  std::string rho = "1";
  std::string froude = "0";
};

struct NumericBlock {
  int cutoff = 2;
  double nu = 0.01;
  int forcing_switch = 0;
  Profile damping{1.0, 0.0};
  Profile forcing{0.0, 0.0};
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::uint64_t max_pairs = 40'000'000;
};

struct ResonancesBlock {
  std::string filter = "resonant";  // or "all" (NLS only)
  bool exceptional = false;         // CHM: also list the exceptional rho^2 set
};

struct InitialBlock {
  std::string kind = "zero";  // zero | random | file
  double scale = 0.1;
  std::string path;
};

struct SimulateBlock {
  std::string system = "effective";  // effective | original | interaction
  std::string scheme = "exponential-euler";
  double dt = 1e-3;
  double t_final = 1.0;
  std::uint64_t record_stride = 100;
  std::uint64_t trajectories = 1;
  InitialBlock initial;
  bool raw_actions = true;
};

struct ChmOracleBlock {
  std::array<int, 2> mode{1, 1};
  std::array<double, 2> a_k{0.6, -0.2};
  std::array<double, 2> a_kbar{-0.3, 0.5};
  std::array<double, 2> a_c{0.4, 0.7};
  double periods = 3.0;
  std::uint64_t steps_per_period = 1000;
};

struct KineticBlock {
  std::string task = "scan";  // scan | collision | evolve
  int dim = 3;
  double damping_scale = 1.0;
  double damping_exponent = 0.0;
  double forcing_scale = 0.0;
  double forcing_exponent = 0.0;
  double coupling = 1.0;
  double phi = 0.0;
  double k_min = 0.1;
  double k_max = 10.0;
  std::uint64_t samples = 1'000'000;
  // scan
  double exponent_min = -4.0;
  double exponent_max = -1.0;
  double exponent_step = 0.05;
  // collision
  double k = 1.0;
  double spectrum_exponent = -3.0;
  // evolve (initial spectrum scale * k^spectrum_exponent on a log grid)
  double spectrum_scale = 1.0;
  std::uint64_t grid_points = 8;
  double t_final = 1.0;
  double dt = 0.01;
  std::uint64_t record_stride = 10;
};

struct MomentsBlock {
  /// Check the second-moment chain equation at interior records (NLS).
  bool chain2 = true;
};

struct RunConfig {
  Command command = Command::Resonances;
  ModelBlock model;
  NumericBlock numeric;
  ResonancesBlock resonances;
  SimulateBlock simulate;
  ChmOracleBlock chm_oracle;
  KineticBlock kinetic;
  MomentsBlock moments;
  std::string out = "effeq-out";
};

/// Validates `j` against the schema (unknown keys, types and ranges) and fills
/// every omitted field with its default. Throws ConfigError.
RunConfig parse_config(const nlohmann::json& j);

/// Full resolved configuration, every default explicit.
nlohmann::json to_json(const RunConfig& c);

/// Builds the model parameters; rational fields are parsed exactly.
ModelParams model_params(const RunConfig& c);
KineticParams kinetic_params(const RunConfig& c);

}  // namespace effeq::cli
