#pragma once

#include "effeq/random.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace effeq {

/// Largest dimension handled by the kinetic module.
inline constexpr int kMaxKineticDim = 6;
/// Continuous wave vector; components beyond the working dimension are zero.
using Point = std::array<double, kMaxKineticDim>;

double norm(const Point& x, int dim);
/// (r, 0, ..., 0).
Point radial_point(double r);

struct Annulus {
  double k_min = 0.1;
  double k_max = 10.0;

  /// Throws std::invalid_argument unless 0 < k_min < k_max < inf.
  void validate() const;
  bool contains(double r) const { return r >= k_min && r <= k_max; }
  double ratio() const { return k_max / k_min; }
  /// Geometric centre sqrt(k_min k_max), the default reference radius.
  double centre() const;
};

/// Isotropic wave-action density n(|k|), defined only on its annulus.
class Spectrum {
 public:
  /// n = scale * k^exponent on the annulus.
  static Spectrum power_law(double scale, double exponent, Annulus annulus);
  /// Values on an increasing radial grid, interpolated log-log between
  /// positive neighbours and linearly in log k otherwise. Values must be >= 0.
  static Spectrum tabulated(std::vector<double> radii, std::vector<double> values);

  /// Throws std::out_of_range outside the annulus.
  double operator()(double r) const;

  const Annulus& annulus() const { return annulus_; }
  bool is_power_law() const { return power_law_; }
  double scale() const { return scale_; }
  double exponent() const { return exponent_; }
  const std::vector<double>& radii() const { return radii_; }
  const std::vector<double>& values() const { return values_; }

 private:
  Spectrum() = default;

  Annulus annulus_;
  bool power_law_ = false;
  double scale_ = 1.0;
  double exponent_ = 0.0;
  std::vector<double> radii_;
  std::vector<double> values_;
};

/// Volume of the unit ball in R^n.
double unit_ball_volume(int n);
/// Area of the unit sphere S^(n-1) in R^n.
double unit_sphere_area(int n);

/// Bounds V1 <= phi <= V1 (3d)^(d - 1/2), V1 the unit-ball volume in R^(2d-1).
struct PhiBounds {
  double lower = 0.0;
  double upper = 0.0;
};
PhiBounds phi_bounds(int dim);

struct KineticParams {
  int dim = 3;
  /// gamma(k) = damping_scale * k^damping_exponent (epsilon' and m).
  double damping_scale = 1.0;
  double damping_exponent = 0.0;
  /// Forcing density b(k) = forcing_scale * k^forcing_exponent.
  double forcing_scale = 0.0;
  double forcing_exponent = 0.0;
  /// epsilon tilde; the collision term carries 16 epsilon~^4.
  double coupling = 1.0;
  /// Constant phi; 0 selects the lower bound V1.
  double phi = 0.0;
  Annulus annulus;
  std::uint64_t samples = 1'000'000;
  std::uint64_t seed = 0;
  unsigned workers = 1;

  void validate() const;
  double gamma(double k) const;
  double forcing(double k) const;
  double phi_value() const;
};

/// n1 n2 n3 + n n1 n2 - n n2 n3 - n n1 n3.
double bracket(double n, double n1, double n2, double n3);
double bracket(const Spectrum& n, const Point& k, const Point& k1, const Point& k2, const Point& k3, int dim);

/// T = 1 / (phi (gamma + gamma1 + gamma2 + gamma3)).
double kernel(const KineticParams& p, const Point& k, const Point& k1, const Point& k2, const Point& k3);

/// Point (k1, k2, k3) of the resonant manifold of k with the weight of the
/// sampling chart: E[weight * f] is the integral of f over the manifold with
/// the measure induced by the two delta functions.
struct ManifoldSample {
  Point k1{}, k2{}, k3{};
  double weight = 0.0;
};

/// Rectangle chart k1 = k + p, k2 = k + q, k3 = k + p + q with p . q = 0:
/// p uniform in the ball of radius 2 k_max, q uniform in the (d-1)-disk of the
/// same radius orthogonal to p. Degenerate draws (p = 0 or q = 0, the trivial
/// tuples) are rejected. Throws std::invalid_argument for d < 2.
ManifoldSample sample_manifold(const Point& k, int dim, const Annulus& annulus, PhiloxEngine& rng);

struct CollisionEstimate {
  double value = 0.0;
  double stderr = 0.0;
  std::uint64_t samples = 0;
};

/// Monte-Carlo estimate of
///   16 eps~^4 int T(k, k1, k2, k3) bracket dmu(k1, k2, k3)
/// over the part of the resonant manifold with k1, k2, k3 in params.annulus.
/// Uses a balance-heuristic mixture of three log-radial charts (one anchored
/// at each of k1, k2, k3). Throws std::invalid_argument for a zero sample
/// budget, k outside the annulus or a spectrum not defined on the annulus.
CollisionEstimate collision_integral(const Spectrum& n, const Point& k, const KineticParams& p);

/// Same samples for every spectrum (common random numbers).
std::vector<CollisionEstimate> collision_integrals(const std::vector<Spectrum>& spectra, const Point& k,
                                                   const KineticParams& p);

struct PowerLawExponents {
  double flux_action = 0.0;  // -(m + 3d - 2) / 3
  double flux_energy = 0.0;  // -(m + 3d) / 3
  std::array<double, 2> equilibria{0.0, -2.0};
};
/// Throws std::invalid_argument for d < 2.
PowerLawExponents power_law_exponents(int dim, double m);

struct ScanPoint {
  double exponent = 0.0;
  double estimate = 0.0;
  double stderr = 0.0;
};

struct ScanResult {
  std::vector<ScanPoint> points;
  /// Located zeros in increasing order: linear interpolation across a sign
  /// change, or the midpoint of a run of points within 2 stderr of zero that
  /// separates opposite signs.
  std::vector<double> roots;
  /// Every point is within 2 stderr of zero.
  bool inconclusive = false;
  double reference_k = 0.0;
  double phi = 0.0;
  PhiBounds bounds;
};

/// Collision integral of n = k^nu at k = annulus centre for every nu in the
/// increasing grid, with common random numbers. Requires an annulus ratio of
/// at least 100.
ScanResult stationarity_scan(const std::vector<double>& exponents, const KineticParams& p);

/// Root of `roots` closest to `target` (NaN if there are none).
double nearest_root(const ScanResult& scan, double target);

/// dn/dtau = -2 gamma n + b^2 + collision at every grid radius, with the
/// collision domain set to the grid range.
std::vector<double> kinetic_rhs(const Spectrum& n, const KineticParams& p);

struct KineticTrajectory {
  std::vector<double> times;
  /// [record][grid point]
  std::vector<std::vector<double>> values;
  std::vector<double> radii;
  std::size_t clip_events = 0;
  /// Clipping happened on more than one step.
  bool unresolved = false;
  /// max |dn/dtau| at the final state.
  double final_residual = 0.0;
};

/// Explicit RK4 with negative values clipped to zero after each step.
/// Records every record_stride steps. Throws NumericError on a non-finite value.
KineticTrajectory integrate_kinetic(const Spectrum& n0, const KineticParams& p, double t_final, double dt,
                                    std::size_t record_stride = 1);

/// n_k = L^d M_k / 2.
double scaled_action_density(double second_moment, double box_size, int dim);
/// b_k = L^(d/2) b.
double scaled_forcing(double b, double box_size, int dim);
/// delta(L) = eps~^2 L^(1/2).
double scaled_delta(double coupling, double box_size);

}  // namespace effeq
