#include "effeq/integrate.hpp"
#include "effeq/stats.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace effeq;

namespace {

std::vector<ComplexVector> gaussian_samples(const LatticeBox& box, const std::vector<double>& var, std::size_t n,
                                            unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<ComplexVector> out(n, ComplexVector(box.size()));
  for (auto& s : out)
    for (std::size_t i = 0; i < box.size(); ++i) s[i] = std::sqrt(var[i] / 2.0) * Complex(g(rng), g(rng));
  return out;
}

}  // namespace

TEST(Moments, EstimatesAndErrors) {
  const LatticeBox box(1, 1);
  std::vector<ComplexVector> samples{{1.0, 2.0, 0.0}, {3.0, 2.0, 0.0}};
  const auto t = estimate_moments(samples, box, {action_moment({-1}), MomentIndex{{{-1}}, {{0}}}});
  EXPECT_DOUBLE_EQ(t.at(action_moment({-1})).value.real(), 5.0);
  EXPECT_DOUBLE_EQ(t.at(MomentIndex{{{-1}}, {{0}}}).value.real(), 4.0);
  EXPECT_DOUBLE_EQ(t.at(action_moment({-1})).stderr_re, 4.0);
  EXPECT_THROW(t.at(action_moment({1})), std::out_of_range);
  EXPECT_THROW(estimate_moments({samples[0]}, box, {action_moment({0})}), std::invalid_argument);
  EXPECT_THROW(estimate_moments(samples, box, {}), std::invalid_argument);
  EXPECT_THROW(estimate_moments(samples, box, {action_moment({2})}), CutoffMismatch);
  EXPECT_EQ(to_string(MomentIndex{{{1}, {0}}, {{-1}}}), "(1)(0)|(-1)");
  EXPECT_EQ(conjugate(MomentIndex{{{1}}, {{0}}}), (MomentIndex{{{0}}, {{1}}}));
}

TEST(QuasiGaussian, DistinctIndicesGiveZeroAndRepeatsGiveWickWeights) {
  const std::map<WaveVector, double> M{{{0}, 2.0}, {{1}, 3.0}, {{2}, 5.0}};
  EXPECT_EQ(quasi_gaussian_predict(M, {{{0}, {1}, {2}}, {{0}, {1}, {1}}}), 0.0);
  EXPECT_EQ(quasi_gaussian_predict(M, {{{0}, {1}, {2}}, {{2}, {0}, {1}}}), 30.0);
  // E|z|^6 = 6 M^3 and E|z0|^4 |z1|^2 = 2 M0^2 M1 for complex Gaussians.
  EXPECT_EQ(quasi_gaussian_predict(M, {{{0}, {0}, {0}}, {{0}, {0}, {0}}}), 6.0 * 8.0);
  EXPECT_EQ(quasi_gaussian_predict(M, {{{0}, {0}, {1}}, {{1}, {0}, {0}}}), 2.0 * 4.0 * 3.0);
  EXPECT_THROW(quasi_gaussian_predict(M, {{{0}, {0}}, {{0}, {0}}}), std::invalid_argument);
}

TEST(QuasiGaussian, MatchesDirectEstimateOnSyntheticField) {
  const LatticeBox box(1, 1);
  const std::vector<double> var{0.5, 1.0, 2.0};
  const auto samples = gaussian_samples(box, var, 200000, 9);
  std::map<WaveVector, double> M;
  for (std::size_t i = 0; i < box.size(); ++i) M[box.vector(i)] = var[i];
  const std::vector<MomentIndex> sextets{{{{-1}, {0}, {1}}, {{1}, {-1}, {0}}},
                                         {{{0}, {0}, {1}}, {{0}, {1}, {0}}},
                                         {{{1}, {1}, {1}}, {{1}, {1}, {1}}},
                                         {{{0}, {1}, {1}}, {{0}, {0}, {1}}}};
  const auto t = estimate_moments(samples, box, sextets);
  for (const auto& s : sextets) {
    const auto& e = t.at(s);
    const double pred = quasi_gaussian_predict(M, s);
    EXPECT_LE(std::abs(e.value.real() - pred), 3.0 * e.stderr_re + 1e-12) << to_string(s);
    EXPECT_LE(std::abs(e.value.imag()), 3.0 * e.stderr_im + 1e-12) << to_string(s);
  }
}

TEST(QuasiStationary, RelaxationFixedPointAndSlowForcing) {
  EXPECT_EQ(quasi_stationary_solve({2.0, -4.0}, 2.0), Complex(1.0, -2.0));
  EXPECT_EQ(quasi_stationary_solve(0.0, 3.0), Complex(0.0));
  EXPECT_THROW(quasi_stationary_solve(1.0, 0.0), std::invalid_argument);
  // dM/dt = f(t) - G M with f = sin(w t): the quasi-stationary value f / G
  // differs from the exact periodic solution by O(w / G).
  const double G = 20.0, w = 0.5;
  const double t = 3.0;
  const double exact = (G * std::sin(w * t) - w * std::cos(w * t)) / (G * G + w * w);
  const double approx = quasi_stationary_solve(std::sin(w * t), G).real();
  EXPECT_LE(std::abs(exact - approx), (w / G) * (1.0 / G) * 1.01);
}

TEST(Chain4, ExplicitSixthMomentFormMatchesItoDrift) {
  const auto p = make_params(NlsModel{2, Rational(1), 0.8}, 1, 0.1, {0.5, 0.0}, {0.3, 0.0}, 1);
  const auto tuples = enumerate_nls_quadruples(2, 1);
  ASSERT_FALSE(tuples.empty());
  const auto& t = tuples.front();
  const MomentIndex fourth{{t.inputs[0], t.inputs[1]}, {t.target(), t.outputs[0]}};
  const LatticeBox box = p.box();
  const auto samples = gaussian_samples(box, std::vector<double>(box.size(), 1.0), 50, 3);
  const auto check = chain4_consistency(samples, p, tuples, fourth);
  EXPECT_LT(check.max_abs_difference, 1e-12);
  EXPECT_LT(std::abs(check.sample_drift - check.explicit_drift), 1e-12);
  EXPECT_THROW(chain4_consistency(samples, p, tuples, {{t.inputs[0], t.inputs[0]}, {t.target(), t.outputs[0]}}),
               std::invalid_argument);
}

TEST(Chain4, RejectsLargeCutoff) {
  const auto p = make_params(NlsModel{2, Rational(1), 1.0}, 4, 0.1, {0.5, 0.0}, {0.3, 0.0});
  const auto s = gaussian_samples(p.box(), std::vector<double>(p.box().size(), 1.0), 2, 1);
  EXPECT_THROW(chain4_consistency(s, p, {}, {{{1, 0}, {0, 1}}, {{1, 1}, {0, 0}}}), ResourceError);
}

TEST(Chain2, ResidualVanishesWithinErrorOnSimulatedEnsemble) {
  const auto p = make_params(NlsModel{2, Rational(1), 0.5}, 1, 0.1, {0.5, 0.0}, {0.5, 0.0}, 1);
  const auto tuples = enumerate_nls_quadruples(2, 1);
  const auto sys = effective_system(p, EffectiveNonlinearity(p, tuples));
  FieldState init = zero_state(p);
  for (auto& z : init.amp) z = 0.5;
  const double h = 0.05;
  const IntegratorConfig cfg{Scheme::Splitting, 0.005, 0.6, 10};
  const auto ens = ensemble({init}, sys, cfg, {4000, 17, 2, true});
  const LatticeBox box = p.box();
  std::vector<WaveVector> modes;
  for (std::size_t i = 0; i < box.size(); ++i) modes.push_back(box.vector(i));
  const auto idx = chain2_indices(modes, tuples);
  auto table = [&](std::size_t rec) {
    std::vector<ComplexVector> s;
    for (const auto& traj : ens.states) s.push_back(traj[rec]);
    return estimate_moments(s, box, idx);
  };
  const std::size_t r = 6;  // tau = 0.3, a transient with nonzero drift
  const auto res = chain2_residual(table(r - 1), table(r), table(r + 1), h, p, tuples, modes);
  for (const auto& x : res) EXPECT_LE(std::abs(x.residual), 4.0 * x.stderr + 1e-3) << to_string(x.k);
  EXPECT_THROW(chain2_residual(table(0), table(1), table(2), 1.0, p, tuples, modes), std::invalid_argument);
}
