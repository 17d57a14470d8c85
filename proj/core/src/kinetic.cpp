#include "effeq/kinetic.hpp"

#include "effeq/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>

namespace effeq {

double norm(const Point& x, int dim) {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) s += x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
  return std::sqrt(s);
}

Point radial_point(double r) {
  Point p{};
  p[0] = r;
  return p;
}

void Annulus::validate() const {
  if (!(k_min > 0.0) || !(k_max > k_min) || !std::isfinite(k_max))
    throw std::invalid_argument("annulus needs 0 < k_min < k_max < inf");
}

double Annulus::centre() const { return std::sqrt(k_min * k_max); }

Spectrum Spectrum::power_law(double scale, double exponent, Annulus annulus) {
  annulus.validate();
  if (!(scale >= 0.0) || !std::isfinite(exponent)) throw std::invalid_argument("power law needs scale >= 0");
  Spectrum s;
  s.annulus_ = annulus;
  s.power_law_ = true;
  s.scale_ = scale;
  s.exponent_ = exponent;
  return s;
}

Spectrum Spectrum::tabulated(std::vector<double> radii, std::vector<double> values) {
  if (radii.size() < 2 || radii.size() != values.size())
    throw std::invalid_argument("tabulated spectrum needs at least two (radius, value) pairs");
  if (!(radii.front() > 0.0)) throw std::invalid_argument("spectrum radii must be positive");
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] > radii[i - 1])) throw std::invalid_argument("spectrum radii must be strictly increasing");
  for (double v : values)
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("spectrum values must be finite and >= 0");
  Spectrum s;
  s.annulus_ = {radii.front(), radii.back()};
  s.radii_ = std::move(radii);
  s.values_ = std::move(values);
  return s;
}

double Spectrum::operator()(double r) const {
  // Relative slack for radii computed from sums of vectors.
  const double slack = 1e-12;
  if (!(r >= annulus_.k_min * (1 - slack) && r <= annulus_.k_max * (1 + slack)))
    throw std::out_of_range("spectrum evaluated outside its annulus at k = " + std::to_string(r));
  if (power_law_) return scale_ * std::pow(r, exponent_);
  r = std::clamp(r, radii_.front(), radii_.back());
  auto it = std::upper_bound(radii_.begin(), radii_.end(), r);
  std::size_t i = it == radii_.end() ? radii_.size() - 2 : static_cast<std::size_t>(it - radii_.begin()) - 1;
  const double t = std::log(r / radii_[i]) / std::log(radii_[i + 1] / radii_[i]);
  const double a = values_[i];
  const double b = values_[i + 1];
  if (a > 0.0 && b > 0.0) return a * std::pow(b / a, t);
  return a + (b - a) * t;
}

double unit_ball_volume(int n) {
  if (n < 0) throw std::invalid_argument("ball dimension must be >= 0");
  return std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0 + 1.0);
}

double unit_sphere_area(int n) {
  if (n < 1) throw std::invalid_argument("sphere dimension must be >= 1");
  return 2.0 * std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0);
}

PhiBounds phi_bounds(int dim) {
  const double v1 = unit_ball_volume(2 * dim - 1);
  return {v1, v1 * std::pow(3.0 * dim, dim - 0.5)};
}

void KineticParams::validate() const {
  if (dim < 2 || dim > kMaxKineticDim)
    throw std::invalid_argument("kinetic dimension must be in [2, " + std::to_string(kMaxKineticDim) + "]");
  if (!(damping_scale > 0.0)) throw std::invalid_argument("damping scale must be positive");
  if (!std::isfinite(damping_exponent) || !std::isfinite(forcing_exponent))
    throw std::invalid_argument("exponents must be finite");
  if (!(forcing_scale >= 0.0)) throw std::invalid_argument("forcing scale must be >= 0");
  if (!(coupling >= 0.0)) throw std::invalid_argument("coupling must be >= 0");
  if (!(phi >= 0.0)) throw std::invalid_argument("phi must be >= 0 (0 selects V1)");
  annulus.validate();
}

double KineticParams::gamma(double k) const { return damping_scale * std::pow(k, damping_exponent); }

double KineticParams::forcing(double k) const { return forcing_scale * std::pow(k, forcing_exponent); }

double KineticParams::phi_value() const { return phi > 0.0 ? phi : phi_bounds(dim).lower; }

double bracket(double n, double n1, double n2, double n3) {
  return n1 * n2 * n3 + n * n1 * n2 - n * n2 * n3 - n * n1 * n3;
}

double bracket(const Spectrum& n, const Point& k, const Point& k1, const Point& k2, const Point& k3, int dim) {
  return bracket(n(norm(k, dim)), n(norm(k1, dim)), n(norm(k2, dim)), n(norm(k3, dim)));
}

double kernel(const KineticParams& p, const Point& k, const Point& k1, const Point& k2, const Point& k3) {
  const int d = p.dim;
  const double g = p.gamma(norm(k, d)) + p.gamma(norm(k1, d)) + p.gamma(norm(k2, d)) + p.gamma(norm(k3, d));
  return 1.0 / (p.phi_value() * g);
}

namespace {

Point add(const Point& a, const Point& b) {
  Point c;
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = a[i] + b[i];
  return c;
}

Point sub(const Point& a, const Point& b) {
  Point c;
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = a[i] - b[i];
  return c;
}

Point scaled(const Point& a, double s) {
  Point c;
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = a[i] * s;
  return c;
}

double dot(const Point& a, const Point& b, int dim) {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) s += a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(i)];
  return s;
}

Point unit_vector(int dim, PhiloxEngine& rng) {
  Point u{};
  double r = 0.0;
  while (r == 0.0) {
    for (int i = 0; i < dim; ++i) u[static_cast<std::size_t>(i)] = rng.normal();
    r = norm(u, dim);
  }
  return scaled(u, 1.0 / r);
}

// Unit vector orthogonal to `a` (a != 0), uniform on that great sphere.
Point orthogonal_unit(const Point& a, int dim, PhiloxEngine& rng) {
  const Point ah = scaled(a, 1.0 / norm(a, dim));
  for (;;) {
    Point x{};
    for (int i = 0; i < dim; ++i) x[static_cast<std::size_t>(i)] = rng.normal();
    x = sub(x, scaled(ah, dot(x, ah, dim)));
    const double r = norm(x, dim);
    if (r > 1e-12) return scaled(x, 1.0 / r);
  }
}

double log_uniform(double lo, double hi, PhiloxEngine& rng) { return lo * std::exp(rng.uniform() * std::log(hi / lo)); }

// Three-chart mixture on the resonant manifold of k. Chart j draws the j-th
// output vector log-uniformly in the annulus:
//   chart 1: k1 ~ g, q = k2 - k log-radial in the plane orthogonal to p = k1 - k
//   chart 2: the same with k1 and k2 swapped
//   chart 3: k3 ~ g, then k1, k2 = (k + k3)/2 +- r u with r = |k - k3|/2
// Densities are with respect to dp dsigma(q) / (2|p|).
class MixtureSampler {
 public:
  MixtureSampler(const Point& k, int dim, const Annulus& a)
      : k_(k),
        dim_(dim),
        annulus_(a),
        log_ratio_(std::log(a.k_max / a.k_min)),
        q_lo_(0.1 * a.k_min),
        q_hi_(2.0 * a.k_max),
        log_q_(std::log(q_hi_ / q_lo_)),
        area_d_(unit_sphere_area(dim)),
        area_plane_(unit_sphere_area(dim - 1)) {}

  void draw(int chart, PhiloxEngine& rng, Point& k1, Point& k2, Point& k3) const {
    if (chart == 2) {
      k3 = scaled(unit_vector(dim_, rng), log_uniform(annulus_.k_min, annulus_.k_max, rng));
      const Point c = scaled(add(k_, k3), 0.5);
      const double r = 0.5 * norm(sub(k_, k3), dim_);
      const Point u = scaled(unit_vector(dim_, rng), r);
      k1 = add(c, u);
      k2 = sub(c, u);
      return;
    }
    const Point anchor = scaled(unit_vector(dim_, rng), log_uniform(annulus_.k_min, annulus_.k_max, rng));
    const Point a = sub(anchor, k_);
    if (norm(a, dim_) == 0.0) {  // measure zero; fall back to the diagonal-free chart
      draw(2, rng, k1, k2, k3);
      return;
    }
    const Point b = scaled(orthogonal_unit(a, dim_, rng), log_uniform(q_lo_, q_hi_, rng));
    k1 = chart == 0 ? anchor : add(k_, b);
    k2 = chart == 0 ? add(k_, b) : anchor;
    k3 = add(add(k_, a), b);
  }

  // Mean of the three chart densities at (k1, k2, k3).
  double density(const Point& k1, const Point& k2, const Point& k3) const {
    const Point p = sub(k1, k_);
    const Point q = sub(k2, k_);
    const double pn = norm(p, dim_);
    const double qn = norm(q, dim_);
    const double d1 = g(norm(k1, dim_)) * h(qn) * 2.0 * pn;
    const double d2 = g(norm(k2, dim_)) * h(pn) * 2.0 * qn;
    const double r = 0.5 * norm(sub(k_, k3), dim_);
    const double d3 = r > 0.0 ? 4.0 * g(norm(k3, dim_)) / (area_d_ * std::pow(r, dim_ - 2)) : 0.0;
    return (d1 + d2 + d3) / 3.0;
  }

 private:
  double g(double r) const {
    return annulus_.contains(r) ? 1.0 / (area_d_ * std::pow(r, dim_) * log_ratio_) : 0.0;
  }
  double h(double r) const {
    return r >= q_lo_ && r <= q_hi_ ? 1.0 / (area_plane_ * std::pow(r, dim_ - 1) * log_q_) : 0.0;
  }

  Point k_;
  int dim_;
  Annulus annulus_;
  double log_ratio_, q_lo_, q_hi_, log_q_, area_d_, area_plane_;
};

constexpr std::uint64_t kShardSize = 1 << 15;

struct ShardSums {
  std::vector<double> sum, sum_sq;
};

template <class Fn>
void run_shards(std::uint64_t shards, unsigned workers, Fn&& fn) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::min<std::uint64_t>(shards, 256))));
  if (workers == 1) {
    for (std::uint64_t s = 0; s < shards; ++s) fn(s);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::uint64_t s; (s = next.fetch_add(1)) < shards && !failed;) {
        try {
          fn(s);
        } catch (...) {
          if (!failed.exchange(true)) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

void check_spectrum_domain(const Spectrum& n, const Annulus& a) {
  const double slack = 1e-12;
  if (n.annulus().k_min > a.k_min * (1 + slack) || n.annulus().k_max < a.k_max * (1 - slack))
    throw std::invalid_argument("spectrum is not defined on the whole integration annulus");
}

}  // namespace

ManifoldSample sample_manifold(const Point& k, int dim, const Annulus& annulus, PhiloxEngine& rng) {
  if (dim < 2) throw std::invalid_argument("the resonant manifold degenerates for d = 1");
  if (dim > kMaxKineticDim) throw std::invalid_argument("dimension exceeds the kinetic maximum");
  annulus.validate();
  const double radius = 2.0 * annulus.k_max;
  for (;;) {
    const double rp = radius * std::pow(rng.uniform(), 1.0 / dim);
    const double rq = radius * std::pow(rng.uniform(), 1.0 / (dim - 1));
    const Point p = scaled(unit_vector(dim, rng), rp);
    if (rp == 0.0 || rq == 0.0) continue;
    const Point q = scaled(orthogonal_unit(p, dim, rng), rq);
    ManifoldSample s;
    s.k1 = add(k, p);
    s.k2 = add(k, q);
    s.k3 = add(add(k, p), q);
    const double vol_p = unit_ball_volume(dim) * std::pow(radius, dim);
    const double vol_q = unit_ball_volume(dim - 1) * std::pow(radius, dim - 1);
    s.weight = vol_p * vol_q / (2.0 * rp);
    return s;
  }
}

std::vector<CollisionEstimate> collision_integrals(const std::vector<Spectrum>& spectra, const Point& k,
                                                   const KineticParams& p) {
  p.validate();
  if (p.samples == 0) throw std::invalid_argument("collision integral needs a positive sample budget");
  const int d = p.dim;
  const double kn = norm(k, d);
  if (!p.annulus.contains(kn)) throw std::invalid_argument("reference k lies outside the annulus");
  for (const auto& n : spectra) check_spectrum_domain(n, p.annulus);
  const std::size_t ns = spectra.size();
  const double prefactor = 16.0 * std::pow(p.coupling, 4);

  const MixtureSampler sampler(k, d, p.annulus);
  const std::uint64_t shards = (p.samples + kShardSize - 1) / kShardSize;
  std::vector<ShardSums> sums(shards);

  run_shards(shards, p.workers, [&](std::uint64_t s) {
    PhiloxEngine rng(p.seed, s);
    ShardSums out{std::vector<double>(ns, 0.0), std::vector<double>(ns, 0.0)};
    const std::uint64_t begin = s * kShardSize;
    const std::uint64_t end = std::min(p.samples, begin + kShardSize);
    std::vector<double> n0(ns);
    for (std::size_t j = 0; j < ns; ++j) n0[j] = spectra[j](kn);
    Point k1, k2, k3;
    for (std::uint64_t i = begin; i < end; ++i) {
      sampler.draw(static_cast<int>(i % 3), rng, k1, k2, k3);
      const double r1 = norm(k1, d), r2 = norm(k2, d), r3 = norm(k3, d);
      if (!p.annulus.contains(r1) || !p.annulus.contains(r2) || !p.annulus.contains(r3)) continue;
      const double w = prefactor * kernel(p, k, k1, k2, k3) / sampler.density(k1, k2, k3);
      for (std::size_t j = 0; j < ns; ++j) {
        const double f = w * bracket(n0[j], spectra[j](r1), spectra[j](r2), spectra[j](r3));
        out.sum[j] += f;
        out.sum_sq[j] += f * f;
      }
    }
    sums[s] = std::move(out);
  });

  const double n = static_cast<double>(p.samples);
  std::vector<CollisionEstimate> est(ns);
  for (std::size_t j = 0; j < ns; ++j) {
    double sum = 0.0, sum_sq = 0.0;
    for (const auto& sh : sums) {
      sum += sh.sum[j];
      sum_sq += sh.sum_sq[j];
    }
    const double mean = sum / n;
    const double var = p.samples > 1 ? std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0)) : 0.0;
    est[j] = {mean, std::sqrt(var / n), p.samples};
  }
  return est;
}

CollisionEstimate collision_integral(const Spectrum& n, const Point& k, const KineticParams& p) {
  return collision_integrals({n}, k, p).front();
}

PowerLawExponents power_law_exponents(int dim, double m) {
  if (dim < 2) throw std::invalid_argument("power-law spectra need d >= 2");
  return {-(m + 3.0 * dim - 2.0) / 3.0, -(m + 3.0 * dim) / 3.0, {0.0, -2.0}};
}

ScanResult stationarity_scan(const std::vector<double>& exponents, const KineticParams& p) {
  p.validate();
  if (exponents.size() < 2) throw std::invalid_argument("exponent grid needs at least two points");
  for (std::size_t i = 1; i < exponents.size(); ++i)
    if (!(exponents[i] > exponents[i - 1])) throw std::invalid_argument("exponent grid must be strictly increasing");
  if (p.annulus.ratio() < 100.0 * (1 - 1e-12))
    throw std::invalid_argument("stationarity scan needs an annulus ratio of at least 100");

  ScanResult out;
  out.reference_k = p.annulus.centre();
  out.phi = p.phi_value();
  out.bounds = phi_bounds(p.dim);
  std::vector<Spectrum> spectra;
  for (double nu : exponents) spectra.push_back(Spectrum::power_law(1.0, nu, p.annulus));
  const auto est = collision_integrals(spectra, radial_point(out.reference_k), p);

  // Classify points as +1, -1 or 0 (within 2 stderr of zero). Pointwise-zero
  // integrands (equilibria) leave only rounding, hence the relative floor.
  double largest = 0.0;
  for (const auto& e : est) largest = std::max(largest, std::abs(e.value));
  const double floor = 1e-9 * largest;
  std::vector<int> sign(exponents.size());
  out.inconclusive = true;
  for (std::size_t i = 0; i < exponents.size(); ++i) {
    out.points.push_back({exponents[i], est[i].value, est[i].stderr});
    const bool zero = std::abs(est[i].value) <= std::max(2.0 * est[i].stderr, floor);
    sign[i] = zero ? 0 : (est[i].value > 0 ? 1 : -1);
    if (!zero) out.inconclusive = false;
  }
  if (out.inconclusive) return out;

  std::size_t prev = exponents.size();  // last significant point
  for (std::size_t i = 0; i < exponents.size(); ++i) {
    if (sign[i] == 0) continue;
    if (prev != exponents.size() && sign[prev] != sign[i]) {
      if (i == prev + 1) {
        const double a = est[prev].value, b = est[i].value;
        out.roots.push_back(exponents[prev] + (exponents[i] - exponents[prev]) * a / (a - b));
      } else {
        out.roots.push_back(0.5 * (exponents[prev + 1] + exponents[i - 1]));
      }
    }
    prev = i;
  }
  return out;
}

double nearest_root(const ScanResult& scan, double target) {
  double best = std::numeric_limits<double>::quiet_NaN();
  for (double r : scan.roots)
    if (std::isnan(best) || std::abs(r - target) < std::abs(best - target)) best = r;
  return best;
}

std::vector<double> kinetic_rhs(const Spectrum& n, const KineticParams& p) {
  if (n.is_power_law()) throw std::invalid_argument("kinetic_rhs needs a tabulated spectrum");
  KineticParams q = p;
  q.annulus = n.annulus();
  const auto& r = n.radii();
  std::vector<double> out(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    out[i] = -2.0 * q.gamma(r[i]) * n.values()[i] + q.forcing(r[i]) * q.forcing(r[i]);
    if (q.coupling > 0.0) out[i] += collision_integral(n, radial_point(r[i]), q).value;
  }
  return out;
}

KineticTrajectory integrate_kinetic(const Spectrum& n0, const KineticParams& p, double t_final, double dt,
                                    std::size_t record_stride) {
  p.validate();
  if (n0.is_power_law()) throw std::invalid_argument("integrate_kinetic needs a tabulated (radial grid) spectrum");
  if (!(dt > 0.0) || !(t_final >= 0.0)) throw std::invalid_argument("need dt > 0 and t_final >= 0");
  if (record_stride == 0) throw std::invalid_argument("record stride must be positive");

  KineticTrajectory traj;
  traj.radii = n0.radii();
  std::vector<double> u = n0.values();
  const std::size_t m = u.size();
  const auto steps = static_cast<std::uint64_t>(std::floor(t_final / dt + 1e-9));

  auto rhs = [&](const std::vector<double>& v) {
    std::vector<double> w(m);
    for (std::size_t i = 0; i < m; ++i) {
      if (!std::isfinite(v[i]))
        throw NumericError("kinetic spectrum blew up at k = " + std::to_string(traj.radii[i]));
      w[i] = std::max(v[i], 0.0);  // stage values may dip below zero
    }
    return kinetic_rhs(Spectrum::tabulated(traj.radii, std::move(w)), p);
  };
  auto axpy = [&](const std::vector<double>& a, double s, const std::vector<double>& b) {
    std::vector<double> c(m);
    for (std::size_t i = 0; i < m; ++i) c[i] = a[i] + s * b[i];
    return c;
  };

  traj.times.push_back(0.0);
  traj.values.push_back(u);
  std::size_t clipped_steps = 0;
  for (std::uint64_t s = 1; s <= steps; ++s) {
    const auto k1 = rhs(u);
    const auto k2 = rhs(axpy(u, 0.5 * dt, k1));
    const auto k3 = rhs(axpy(u, 0.5 * dt, k2));
    const auto k4 = rhs(axpy(u, dt, k3));
    bool clipped = false;
    for (std::size_t i = 0; i < m; ++i) {
      u[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      if (!std::isfinite(u[i])) {
        throw NumericError("kinetic spectrum blew up at tau = " + std::to_string(s * dt) +
                           ", k = " + std::to_string(traj.radii[i]));
      }
      if (u[i] < 0.0) {
        u[i] = 0.0;
        ++traj.clip_events;
        clipped = true;
      }
    }
    if (clipped) ++clipped_steps;
    if (s % record_stride == 0) {
      traj.times.push_back(static_cast<double>(s) * dt);
      traj.values.push_back(u);
    }
  }
  traj.unresolved = clipped_steps > 1;
  double res = 0.0;
  for (double v : rhs(u)) res = std::max(res, std::abs(v));
  traj.final_residual = res;
  return traj;
}

double scaled_action_density(double second_moment, double box_size, int dim) {
  return std::pow(box_size, dim) * second_moment / 2.0;
}

double scaled_forcing(double b, double box_size, int dim) { return std::pow(box_size, dim / 2.0) * b; }

double scaled_delta(double coupling, double box_size) { return coupling * coupling * std::sqrt(box_size); }

}  // namespace effeq
