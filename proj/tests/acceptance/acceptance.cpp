// Runs the acceptance criteria and prints one PASS/FAIL line per criterion.
// Exit status is the number of failed criteria (0 when all pass).

#include "effeq/chm_cluster.hpp"
#include "effeq/integrate.hpp"
#include "effeq/kinetic.hpp"
#include "effeq/resonance.hpp"
#include "effeq/stats.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>

using namespace effeq;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(4);
  os << x;
  return os.str();
}

FieldState random_state(const ModelParams& p, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> g(0.0, scale);
  FieldState s(p.box(), p.real_field());
  for (auto& z : s.amp) z = {g(rng), g(rng)};
  if (s.real) s.enforce_reality();
  return s;
}

double max_diff(const ComplexVector& a, const ComplexVector& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// ---- 1 ----
Outcome nls_1d_empty() {
  const auto t = enumerate_nls_quadruples(1, 32);
  return {t.empty(), std::to_string(t.size()) + " tuples at d=1, K=32"};
}

// ---- 2 ----
using Quad = std::array<WaveVector, 4>;  // inputs (sorted), then outputs

std::set<Quad> brute_force_rectangles(int K) {
  const LatticeBox box(2, K);
  std::set<Quad> out;
  const std::size_t n = box.size();
  auto sq = [](const WaveVector& v) { return v.m() * v.m() + v.n() * v.n(); };
  for (std::size_t i = 0; i < n; ++i) {
    const WaveVector k1 = box.vector(i);
    for (std::size_t j = i; j < n; ++j) {
      const WaveVector k2 = box.vector(j);
      const int mx = k1.m() + k2.m(), my = k1.n() + k2.n();
      const int s12 = sq(k1) + sq(k2);
      for (std::size_t l = 0; l < n; ++l) {
        const WaveVector k3 = box.vector(l);
        const WaveVector k{mx - k3.m(), my - k3.n()};
        if (!box.contains(k) || sq(k3) + sq(k) != s12) continue;
        if (k3 == k1 || k3 == k2) continue;  // trivial pairing
        out.insert({k1, k2, k3, k});
      }
    }
  }
  return out;
}

Outcome nls_2d_rectangles() {
  const int K = 12;
  const auto tuples = enumerate_nls_quadruples(2, K);
  std::set<Quad> found;
  std::size_t bad = 0;
  for (const auto& t : tuples) {
    if (!is_rectangle({t.target(), t.inputs[0], t.inputs[1], t.outputs[0]})) ++bad;
    found.insert({t.inputs[0], t.inputs[1], t.outputs[0], t.target()});
  }
  const auto brute = brute_force_rectangles(K);
  const bool same = found == brute && found.size() == tuples.size();
  return {bad == 0 && same, std::to_string(tuples.size()) + " tuples, " + std::to_string(bad) +
                                " non-rectangles, brute force " + std::to_string(brute.size()) +
                                (same ? " (identical)" : " (differs)")};
}

// ---- 3 ----
Outcome nls_2d_single_cluster() {
  const LatticeBox box(2, 8);
  const auto part = clusters(enumerate_nls_quadruples(2, 8), box);
  std::size_t non_singleton = 0, covered = 0;
  for (std::size_t c = 0; c < part.cluster_count(); ++c) {
    if (part.cluster_size(c) < 2) continue;
    ++non_singleton;
    covered = part.members(c).size();
  }
  return {non_singleton == 1 && covered == box.size(),
          std::to_string(non_singleton) + " non-singleton cluster(s) covering " + std::to_string(covered) + "/" +
              std::to_string(box.size())};
}

// ---- 4 ----
Outcome chm_typical_clusters() {
  const int K = 8;
  const auto ex = exceptional_rhos(0, K);
  const auto values = ex.distinct_values();
  const Rational rho2(1);
  const bool typical = is_typical(rho2, 0, K) && !ex.contains(QuadraticSurd(rho2));
  const LatticeBox box(2, K);
  const auto part = clusters(enumerate_chm_triads(rho2, 0, K), box, {true});
  std::size_t largest = 0, triples = 0, wrong_shape = 0;
  for (std::size_t c = 0; c < part.cluster_count(); ++c) {
    largest = std::max(largest, part.cluster_size(c));
    if (part.cluster_size(c) == 1) continue;
    ++triples;
    if (part.members(c).size() != 2 || part.catalysts(c).size() != 1) {
      ++wrong_shape;
      continue;
    }
    // Canonical {(m, n), (m, -n)} with catalyst (0, 2n), all up to k -> -k.
    const WaveVector a = part.members(c)[0], b = part.members(c)[1], cat = part.catalysts(c)[0];
    const bool mirror = std::abs(a.m()) == std::abs(b.m()) && std::abs(a.n()) == std::abs(b.n()) &&
                        a.m() != 0 && a.n() != 0 && (a.m() * a.n()) == -(b.m() * b.n());
    if (!mirror || cat.m() != 0 || std::abs(cat.n()) != 2 * std::abs(a.n())) ++wrong_shape;
  }
  const bool pass = typical && largest <= 3 && wrong_shape == 0 && triples > 0;
  return {pass, std::to_string(values.size()) + " exceptional values, rho^2 = 1 " +
                    (typical ? "typical" : "NOT typical") + ", " + std::to_string(triples) +
                    " non-singleton clusters, max size " + std::to_string(largest) + ", " +
                    std::to_string(wrong_shape) + " of the wrong shape"};
}

// Canonical triple (k, kbar, c) of a catalytic cluster.
struct Triple {
  WaveVector k, kbar, c;
};

std::vector<Triple> chm_triples(const ClusterPartition& part) {
  std::vector<Triple> out;
  for (std::size_t c = 0; c < part.cluster_count(); ++c) {
    if (part.cluster_size(c) != 3) continue;
    const int m = std::abs(part.members(c)[0].m());
    const int n = part.catalysts(c)[0].n() / 2;
    out.push_back({{m, n}, {m, -n}, {0, 2 * n}});
  }
  return out;
}

// ---- 5 ----
Outcome chm_rhs_equivalence() {
  const Rational rho(1), F(0);
  const int K = 4;
  const auto p = make_params(ChmModel{rho, F}, K, 0.01, {1.0, 0.0}, {0.0, 0.0});
  const auto tuples = active_tuples(enumerate_chm_triads(rho * rho, F, K));
  const EffectiveNonlinearity eff(p, tuples);
  const auto triples = chm_triples(clusters(tuples, p.box(), {true}));
  const LatticeBox box = p.box();
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = random_state(p, rng, 1.0);
    const auto R = eff(s.amp);
    // Closed-form right-hand side, assembled mode by mode.
    ComplexVector C(box.size(), 0.0);
    for (const auto& t : triples) {
      const Cluster3State cs{s.at(t.k), s.at(t.kbar), s.at(t.c),
                             effective_coupling_factor(rho) * coupling(t.k, rho, F).value};
      const auto d = cluster_rhs(cs);
      C[box.index(t.k)] = d.a_k;
      C[box.index(t.kbar)] = d.a_kbar;
      C[box.index(-t.k)] = std::conj(d.a_k);
      C[box.index(-t.kbar)] = std::conj(d.a_kbar);
    }
    worst = std::max(worst, max_diff(R, C));
  }
  return {worst <= 1e-12 && !triples.empty(),
          std::to_string(triples.size()) + " triples, max modewise difference " + fmt(worst)};
}

// ---- 6 ----
Outcome closed_form_vs_rk4() {
  const Rational rho(1), F(0);
  const auto p = make_params(ChmModel{rho, F}, 2, 0.01, {1.0, 0.0}, {0.0, 0.0});
  auto sys = effective_system(p, EffectiveNonlinearity(p, active_tuples(enumerate_chm_triads(1, 0, 2))));
  std::fill(sys.linear.begin(), sys.linear.end(), Complex(0.0));  // undamped resonant flow
  const WaveVector k{1, 1}, kbar{1, -1}, c{0, 2};
  FieldState s(p.box(), true);
  s.set(k, {0.6, -0.2});
  s.set(kbar, {-0.3, 0.5});
  s.set(c, {0.4, 0.7});
  const Cluster3State cs{s.at(k), s.at(kbar), s.at(c), effective_coupling_factor(rho) * coupling(k, rho, F).value};
  const double T = period(cs);
  const double dt = 1e-3 * T;
  const auto traj = simulate(s, sys, {Scheme::Rk4, dt, 3.0 * T * (1.0 + 1e-12), 1}, {});
  double err = 0.0, pair_drift = 0.0, cat_drift = 0.0;
  const double pair0 = std::norm(cs.a_k) + std::norm(cs.a_kbar);
  const double cat0 = std::norm(cs.a_c);
  for (const auto& rec : traj.records) {
    const auto exact = closed_form(cs, rec.tau).state;
    err = std::max({err, std::abs(rec.at(k) - exact.a_k), std::abs(rec.at(kbar) - exact.a_kbar)});
    pair_drift = std::max(pair_drift, std::abs(std::norm(rec.at(k)) + std::norm(rec.at(kbar)) - pair0));
    cat_drift = std::max(cat_drift, std::abs(std::norm(rec.at(c)) - cat0));
  }
  const bool pass = traj.records.size() == 3001 && err <= 1e-6 && pair_drift <= 1e-10 && cat_drift <= 1e-10;
  return {pass, "sup error " + fmt(err) + ", pair drift " + fmt(pair_drift) + ", catalyst drift " + fmt(cat_drift) +
                    " over " + std::to_string(traj.records.size() - 1) + " steps"};
}

// ---- 7 ----
Outcome averaging_convergence() {
  const std::vector<double> nus{1e-1, 3e-2, 1e-2, 3e-3};
  std::mt19937_64 rng(7);
  const auto p0 = make_params(NlsModel{2, Rational(1), 1.0}, 2, nus[0], {0.3, 0.0}, {0.0, 0.0});
  const auto init = random_state(p0, rng, 0.4);
  std::vector<double> errors;
  for (double nu : nus) {
    auto p = p0;
    p.nu = nu;
    // At least 50 steps per fast period and a whole number of steps up to tau = 1.
    const auto steps = static_cast<std::size_t>(std::ceil(50.0 / nu));
    const IntegratorConfig cfg{Scheme::IntegratingFactorRk4, 1.0 / static_cast<double>(steps), 1.0, steps};
    const auto a = simulate(init, interaction_system(p), cfg, {});
    const auto sys = effective_system(p, EffectiveNonlinearity(p, enumerate_nls_quadruples(2, 2)));
    const auto e = simulate(init, sys, {Scheme::IntegratingFactorRk4, 1e-3, 1.0, 1000}, {});
    double d2 = 0.0;
    for (std::size_t i = 0; i < init.amp.size(); ++i) d2 += std::norm(a.records.back().amp[i] - e.records.back().amp[i]);
    errors.push_back(std::sqrt(d2));
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < errors.size(); ++i) decreasing = decreasing && errors[i] < errors[i - 1];
  const double drop = errors.front() / errors.back();
  std::string detail = "errors";
  for (double e : errors) detail += " " + fmt(e);
  detail += ", drop " + fmt(drop) + "x";
  return {decreasing && drop >= 3.0, detail};
}

// ---- 8 ----
Outcome decay_bound() {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::size_t violations = 0, checked = 0;
  double worst = -1e300;
  for (int cfg = 0; cfg < 10; ++cfg) {
    const Profile damping{0.1 + u(rng), 2.0 * u(rng)};
    const auto p = make_params(NlsModel{2, Rational(1), 0.5 + u(rng)}, 2, 0.02 + 0.1 * u(rng), damping, {0.0, 0.0});
    const auto init = random_state(p, rng, 0.5);
    const double g = p.min_damping();
    const auto traj = simulate(init, original_system(p), {Scheme::IntegratingFactorRk4, 1e-3, 2.0, 10}, {});
    const double n0 = init.norm2();
    for (const auto& rec : traj.records) {
      const double bound = n0 * std::exp(-rec.tau * g);
      ++checked;
      worst = std::max(worst, rec.norm2() / bound);
      if (rec.norm2() > bound) ++violations;
    }
  }
  return {violations == 0, std::to_string(checked) + " recorded states, " + std::to_string(violations) +
                               " violations, max |v|^2 / bound " + fmt(worst)};
}

// ---- 9 ----
Outcome catalytic_moments() {
  const Rational rho(1), F(0);
  const double gamma = 1.0, b = 0.5;
  auto p = make_params(ChmModel{rho, F}, 2, 0.01, {gamma, 0.0}, {b, 0.0}, 1);
  const auto tuples = active_tuples(enumerate_chm_triads(1, 0, 2));
  const LatticeBox box = p.box();
  const IntegratorConfig cfg{Scheme::Splitting, 0.01, 4.0, 400};
  const EnsembleOptions opts{10000, 99, 1, false};

  const auto base = ensemble({zero_state(p)}, effective_system(p, EffectiveNonlinearity(p, tuples)), cfg, opts);
  const auto& mean = base.mean_action.back();
  const auto se = base.stderr_action(base.mean_action.size() - 1);
  auto second = [&](const WaveVector& k) { return 2.0 * mean[box.index(k)]; };

  const ClusterForcing f{gamma, gamma, gamma, b, b, b};
  const auto target = stationary_moments(f);
  const double pair11 = second({1, 1}) + second({1, -1});
  const double pair21 = second({2, 1}) + second({2, -1});
  const double cat = second({0, 2});
  double worst = 0.0;
  for (double x : {pair11 / target.pair, pair21 / target.pair, cat / target.catalyst})
    worst = std::max(worst, std::abs(x - 1.0));

  // Switch off the forcing of the cluster {(1,1), (1,-1)} and its conjugates.
  auto q = p;
  for (const WaveVector& k : {WaveVector{1, 1}, WaveVector{1, -1}, WaveVector{-1, -1}, WaveVector{-1, 1}})
    q.forcing[box.index(k)] = 0.0;
  const auto off = ensemble({zero_state(q)}, effective_system(q, EffectiveNonlinearity(q, tuples)), cfg,
                            {opts.trajectories, 1234, 1, false});
  const auto& mean_off = off.mean_action.back();
  const auto se_off = off.stderr_action(off.mean_action.size() - 1);
  double worst_z = 0.0;
  for (std::size_t i = 0; i < box.size(); ++i) {
    const WaveVector k = box.vector(i);
    if (std::abs(k.m()) == 1 && std::abs(k.n()) == 1) continue;
    const double s = std::hypot(se[i], se_off[i]);
    if (s == 0.0) continue;
    worst_z = std::max(worst_z, std::abs(mean[i] - mean_off[i]) / s);
  }
  const double switched_off = 2.0 * (mean_off[box.index({1, 1})] + mean_off[box.index({1, -1})]);
  const bool pass = worst <= 0.05 && worst_z <= 4.0;
  return {pass, "max relative error " + fmt(worst) + " (pair " + fmt(pair11) + ", " + fmt(pair21) + " vs " +
                    fmt(target.pair) + ", catalyst " + fmt(cat) + " vs " + fmt(target.catalyst) +
                    "); unforced cluster pair " + fmt(switched_off) + ", other modes max |z| " + fmt(worst_z)};
}

// ---- 10 ----
Outcome kinetic_equilibria() {
  KineticParams p;
  p.dim = 3;
  p.samples = 200000;
  const auto c = Spectrum::power_law(1.5, 0.0, p.annulus);
  const auto rj = Spectrum::power_law(1.5, -2.0, p.annulus);
  PhiloxEngine rng(10, 0);
  const Point k = radial_point(1.0);
  std::size_t nonzero_constant = 0, on_annulus = 0;
  double worst_rel = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const auto s = sample_manifold(k, 3, p.annulus, rng);
    const double r1 = norm(s.k1, 3), r2 = norm(s.k2, 3), r3 = norm(s.k3, 3);
    if (!p.annulus.contains(r1) || !p.annulus.contains(r2) || !p.annulus.contains(r3)) continue;
    ++on_annulus;
    if (bracket(c, k, s.k1, s.k2, s.k3, 3) != 0.0) ++nonzero_constant;
    const double n0 = rj(1.0), n1 = rj(r1), n2 = rj(r2), n3 = rj(r3);
    const double scale = n1 * n2 * n3 + n0 * n1 * n2 + n0 * n2 * n3 + n0 * n1 * n3;
    worst_rel = std::max(worst_rel, std::abs(bracket(n0, n1, n2, n3)) / scale);
  }
  const auto ec = collision_integral(c, k, p);
  const auto er = collision_integral(rj, k, p);
  const bool within = std::abs(ec.value) <= 2.0 * ec.stderr && std::abs(er.value) <= 2.0 * er.stderr;
  const bool pass = nonzero_constant == 0 && worst_rel <= 1e-12 && within && on_annulus > 0;
  return {pass, std::to_string(on_annulus) + " manifold samples on the annulus; constant nonzero " +
                    std::to_string(nonzero_constant) + ", Rayleigh-Jeans max relative " + fmt(worst_rel) +
                    "; collision " + fmt(ec.value) + " +- " + fmt(ec.stderr) + ", " + fmt(er.value) + " +- " +
                    fmt(er.stderr)};
}

// ---- 11 ----
Outcome power_law_roots() {
  KineticParams p;
  p.dim = 3;
  p.damping_exponent = 0.0;
  p.annulus = {0.1, 10.0};
  p.samples = 1'000'000;
  p.seed = 11;
  std::vector<double> grid;
  for (int i = 0; i <= 60; ++i) grid.push_back(-4.0 + 0.05 * i);
  const auto scan = stationarity_scan(grid, p);
  const auto ex = power_law_exponents(3, 0.0);
  const double r_action = nearest_root(scan, ex.flux_action);
  const double r_energy = nearest_root(scan, ex.flux_energy);
  const bool ok_action = std::abs(r_action - ex.flux_action) <= 0.15;
  const bool ok_energy = std::abs(r_energy - ex.flux_energy) <= 0.15;
  std::string roots;
  for (double r : scan.roots) roots += " " + fmt(r);
  return {!scan.inconclusive && ok_action && ok_energy,
          "roots" + roots + "; nearest to " + fmt(ex.flux_action) + ": " + fmt(r_action) + ", nearest to " +
              fmt(ex.flux_energy) + ": " + fmt(r_energy) + (scan.inconclusive ? " (inconclusive)" : "")};
}

// ---- 12 ----
Outcome quasi_gaussian() {
  const LatticeBox box(1, 1);
  const std::vector<double> var{0.7, 1.0, 1.6};
  std::mt19937_64 rng(12);
  std::normal_distribution<double> g;
  std::vector<ComplexVector> samples(1000000, ComplexVector(box.size()));
  for (auto& s : samples)
    for (std::size_t i = 0; i < box.size(); ++i) s[i] = std::sqrt(var[i] / 2.0) * Complex(g(rng), g(rng));
  std::map<WaveVector, double> M;
  for (std::size_t i = 0; i < box.size(); ++i) M[box.vector(i)] = var[i];

  // Half of the sextets pair lower with upper indices so the prediction is nonzero.
  std::uniform_int_distribution<int> pick(0, static_cast<int>(box.size()) - 1);
  std::vector<MomentIndex> sextets;
  std::set<MomentIndex> seen;
  while (sextets.size() < 50) {
    MomentIndex s;
    for (int j = 0; j < 3; ++j) s.upper.push_back(box.vector(static_cast<std::size_t>(pick(rng))));
    if (sextets.size() % 2 == 0) {
      s.lower = s.upper;
      std::shuffle(s.lower.begin(), s.lower.end(), rng);
    } else {
      for (int j = 0; j < 3; ++j) s.lower.push_back(box.vector(static_cast<std::size_t>(pick(rng))));
    }
    if (seen.insert(s).second) sextets.push_back(s);
  }
  const auto table = estimate_moments(samples, box, sextets);
  std::size_t outside = 0, nonzero = 0;
  double worst = 0.0;
  for (const auto& s : sextets) {
    const auto& e = table.at(s);
    const double pred = quasi_gaussian_predict(M, s);
    if (pred != 0.0) ++nonzero;
    const double zr = std::abs(e.value.real() - pred) / e.stderr_re;
    const double zi = e.stderr_im > 0.0 ? std::abs(e.value.imag()) / e.stderr_im : 0.0;
    worst = std::max({worst, zr, zi});
    if (zr > 3.0 || zi > 3.0) ++outside;
  }
  return {outside == 0, std::to_string(sextets.size()) + " sextets (" + std::to_string(nonzero) +
                            " with nonzero prediction), max |z| " + fmt(worst)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"nls-1d-empty-resonant-set", nls_1d_empty},
      {"nls-2d-rectangles", nls_2d_rectangles},
      {"nls-2d-single-cluster", nls_2d_single_cluster},
      {"chm-typical-cluster-sizes", chm_typical_clusters},
      {"chm-effective-rhs-equivalence", chm_rhs_equivalence},
      {"chm-closed-form-vs-rk4", closed_form_vs_rk4},
      {"averaging-convergence", averaging_convergence},
      {"decay-bound", decay_bound},
      {"catalytic-ou-moments", catalytic_moments},
      {"kinetic-equilibria", kinetic_equilibria},
      {"power-law-exponents", power_law_roots},
      {"quasi-gaussian-closure", quasi_gaussian},
  };
  int failed = 0;
  int index = 0;
  for (const auto& [name, run] : criteria) {
    ++index;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failed;
    std::printf("%s %2d %-30s %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", index, name.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failed;
}
