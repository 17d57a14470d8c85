#include "effeq/field.hpp"

#include "effeq/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace effeq {

std::string model_name(const Model& model) {
  return std::holds_alternative<NlsModel>(model) ? "nls" : "chm";
}

int model_dim(const Model& model) {
  if (const auto* nls = std::get_if<NlsModel>(&model)) return nls->dim;
  return 2;
}

int model_degree(const Model& model) { return std::holds_alternative<NlsModel>(model) ? 3 : 2; }

Dispersion model_dispersion(const Model& model) {
  if (const auto* nls = std::get_if<NlsModel>(&model)) return NlsDispersion{nls->dim, nls->box_size};
  const auto& chm = std::get<ChmModel>(model);
  return ChmDispersion{chm.rho, chm.froude};
}

double slow_time_parameter(double epsilon, int degree, NuConvention convention) {
  return convention == NuConvention::Cubic ? epsilon * epsilon : std::pow(epsilon, degree);
}

std::vector<double> evaluate_profile(const Profile& profile, const LatticeBox& box) {
  std::vector<double> out(box.size());
  for (std::size_t i = 0; i < box.size(); ++i) {
    const double r = std::max(1.0, std::sqrt(static_cast<double>(box.vector(i).norm2())));
    out[i] = profile.exponent == 0.0 ? profile.scale : profile.scale * std::pow(r, profile.exponent);
  }
  return out;
}

double ModelParams::min_damping() const {
  return damping.empty() ? 0.0 : *std::min_element(damping.begin(), damping.end());
}

void ModelParams::validate() const {
  if (const auto* nls = std::get_if<NlsModel>(&model)) {
    if (nls->dim < 1 || nls->dim > kMaxDim) throw std::invalid_argument("model.dim must be in [1, 4]");
    if (nls->box_size <= 0) throw std::invalid_argument("model.box_size must be positive");
  } else {
    const auto& chm = std::get<ChmModel>(model);
    if (chm.rho <= 0) throw std::invalid_argument("model.rho must be positive");
    if (chm.froude < 0) throw std::invalid_argument("model.froude must be nonnegative");
  }
  if (cutoff < 0) throw std::invalid_argument("cutoff must be nonnegative");
  if (!(nu > 0.0)) throw std::invalid_argument("nu must be positive");
  if (forcing_switch != 0 && forcing_switch != 1) throw std::invalid_argument("mu must be 0 or 1");
  const std::size_t n = box().size();
  if (damping.size() != n) throw CutoffMismatch("damping table does not match the cutoff box");
  if (forcing.size() != n) throw CutoffMismatch("forcing table does not match the cutoff box");
  for (double g : damping)
    if (!(g > 0.0) || !std::isfinite(g)) throw std::invalid_argument("damping rates must be positive and finite");
  for (double b : forcing)
    if (!(b >= 0.0) || !std::isfinite(b)) throw std::invalid_argument("forcing amplitudes must be nonnegative");
}

ModelParams make_params(const Model& model, int cutoff, double nu, const Profile& damping, const Profile& forcing,
                        int forcing_switch) {
  ModelParams p;
  p.model = model;
  p.cutoff = cutoff;
  p.nu = nu;
  p.epsilon = std::pow(nu, 1.0 / model_degree(model));
  p.forcing_switch = forcing_switch;
  p.damping = evaluate_profile(damping, p.box());
  p.forcing = evaluate_profile(forcing, p.box());
  p.validate();
  return p;
}

Complex FieldState::at(const WaveVector& k) const {
  if (!box.contains(k)) throw CutoffMismatch(to_string(k) + " is outside the state box");
  return amp[box.index(k)];
}

void FieldState::set(const WaveVector& k, Complex z) {
  if (!box.contains(k)) throw CutoffMismatch(to_string(k) + " is outside the state box");
  const std::size_t i = box.index(k);
  if (!real) {
    amp[i] = z;
    return;
  }
  const std::size_t j = box.index_of_negative(i);
  if (i == j) {
    amp[i] = z.real();
  } else {
    amp[i] = z;
    amp[j] = std::conj(z);
  }
}

void FieldState::enforce_reality() {
  if (!real) return;
  for (std::size_t i = 0; i < amp.size(); ++i) {
    const std::size_t j = box.index_of_negative(i);
    if (j < i) continue;
    if (i == j) {
      amp[i] = amp[i].real();
    } else {
      const Complex z = 0.5 * (amp[i] + std::conj(amp[j]));
      amp[i] = z;
      amp[j] = std::conj(z);
    }
  }
}

bool FieldState::satisfies_reality(double tolerance) const {
  if (!real) return true;
  for (std::size_t i = 0; i < amp.size(); ++i)
    if (std::abs(amp[box.index_of_negative(i)] - std::conj(amp[i])) > tolerance) return false;
  return true;
}

double FieldState::norm2() const {
  double s = 0.0;
  for (const auto& z : amp) s += std::norm(z);
  return s;
}

FieldState zero_state(const ModelParams& p) { return FieldState(p.box(), p.real_field()); }

std::vector<double> frequencies(const ModelParams& p) {
  const LatticeBox box = p.box();
  const Dispersion disp = model_dispersion(p.model);
  std::vector<double> w(box.size());
  for (std::size_t i = 0; i < box.size(); ++i) w[i] = omega_value(disp, box.vector(i));
  return w;
}

namespace {

void require_box(const FieldState& s, const ModelParams& p) {
  if (s.box != p.box()) throw CutoffMismatch("state box does not match model cutoff/dimension");
  if (s.amp.size() != s.box.size()) throw CutoffMismatch("state amplitude table has the wrong size");
}

// Makes a derivative of a real field exactly reality-consistent by copying
// the lower-index member of each conjugate pair.
void mirror_real(ComplexVector& out, const LatticeBox& box) {
  for (std::size_t i = 0; i < out.size(); ++i) {
    const std::size_t j = box.index_of_negative(i);
    if (j < i) continue;
    if (i == j) out[i] = out[i].real();
    else out[j] = std::conj(out[i]);
  }
}

struct ChmShape {
  double rho;
  double rho2;
  double froude;
  double weight(const WaveVector& k) const {
    return static_cast<double>(k.m()) * k.m() + static_cast<double>(k.n()) * k.n() * rho2;
  }
  double denom(const WaveVector& k) const { return weight(k) + froude * rho2; }
  double prefactor(const WaveVector& k) const {
    const double d = denom(k);
    return d == 0.0 ? 0.0 : 1.0 / (rho * d);
  }
};

ChmShape chm_shape(const ChmModel& m) {
  const double rho = to_double(m.rho);
  return {rho, rho * rho, to_double(m.froude)};
}

ComplexVector nls_nonlinearity(const ComplexVector& v, const LatticeBox& box, double delta) {
  const int dim = box.dim();
  const int K = box.cutoff();
  const std::int64_t side2 = 4 * K + 1;
  const std::size_t n = box.size();

  // Offset of each vector in the doubled box [-2K, 2K]^d.
  std::vector<std::int64_t> offset(n);
  std::int64_t base = 0;
  for (int c = 0; c < dim; ++c) base = base * side2 + 2 * K;
  std::size_t doubled = 1;
  for (int c = 0; c < dim; ++c) doubled *= static_cast<std::size_t>(side2);
  for (std::size_t i = 0; i < n; ++i) {
    const WaveVector k = box.vector(i);
    std::int64_t o = 0;
    for (int c = 0; c < dim; ++c) o = o * side2 + k[c];
    offset[i] = o;
  }

  ComplexVector pair_sum(doubled);
  for (std::size_t i = 0; i < n; ++i) {
    if (v[i] == Complex(0.0)) continue;
    for (std::size_t j = 0; j < n; ++j) pair_sum[static_cast<std::size_t>(base + offset[i] + offset[j])] += v[i] * v[j];
  }
  ComplexVector out(n);
  const Complex coupling(0.0, delta);
  for (std::size_t k = 0; k < n; ++k) {
    Complex s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += pair_sum[static_cast<std::size_t>(base + offset[k] + offset[j])] * std::conj(v[j]);
    out[k] = coupling * s;
  }
  return out;
}

ComplexVector chm_nonlinearity(const ComplexVector& v, const LatticeBox& box, const ChmShape& shape) {
  const std::size_t n = box.size();
  std::vector<WaveVector> vecs(n);
  for (std::size_t i = 0; i < n; ++i) vecs[i] = box.vector(i);
  ComplexVector out(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double pref = shape.prefactor(vecs[k]);
    if (pref == 0.0) continue;
    Complex s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (v[i] == Complex(0.0)) continue;
      const WaveVector k2 = vecs[k] - vecs[i];
      if (!box.contains(k2)) continue;
      const auto& k1 = vecs[i];
      const double cross = static_cast<double>(k1.m()) * k2.n() - static_cast<double>(k1.n()) * k2.m();
      if (cross == 0.0) continue;
      s += shape.weight(k1) * cross * v[i] * v[box.index(k2)];
    }
    out[k] = pref * s;
  }
  return out;
}

}  // namespace

ComplexVector nonlinearity(const ComplexVector& v, const ModelParams& p) {
  const LatticeBox box = p.box();
  if (v.size() != box.size()) throw CutoffMismatch("amplitude vector does not match the cutoff box");
  if (const auto* nls = std::get_if<NlsModel>(&p.model)) return nls_nonlinearity(v, box, nls->delta);
  ComplexVector out = chm_nonlinearity(v, box, chm_shape(std::get<ChmModel>(p.model)));
  mirror_real(out, box);
  return out;
}

FieldState original_rhs(const FieldState& v, double tau, const ModelParams& p) {
  require_box(v, p);
  const auto w = frequencies(p);
  FieldState out = v;
  out.tau = tau;
  out.amp = nonlinearity(v.amp, p);
  for (std::size_t i = 0; i < out.amp.size(); ++i)
    out.amp[i] += Complex(-p.damping[i], w[i] / p.nu) * v.amp[i];
  if (v.real) mirror_real(out.amp, v.box);
  return out;
}

FieldState to_interaction(const FieldState& v, double tau, const ModelParams& p) {
  require_box(v, p);
  const auto w = frequencies(p);
  FieldState a = v;
  a.tau = tau;
  for (std::size_t i = 0; i < a.amp.size(); ++i) a.amp[i] = std::polar(1.0, -w[i] * tau / p.nu) * v.amp[i];
  if (a.real) mirror_real(a.amp, a.box);
  return a;
}

FieldState from_interaction(const FieldState& a, double tau, const ModelParams& p) {
  require_box(a, p);
  const auto w = frequencies(p);
  FieldState v = a;
  v.tau = tau;
  for (std::size_t i = 0; i < v.amp.size(); ++i) v.amp[i] = std::polar(1.0, w[i] * tau / p.nu) * a.amp[i];
  if (v.real) mirror_real(v.amp, v.box);
  return v;
}

FieldState interaction_rhs(const FieldState& a, double tau, const ModelParams& p) {
  require_box(a, p);
  const auto w = frequencies(p);
  const std::size_t n = a.amp.size();
  ComplexVector rotated(n);
  for (std::size_t i = 0; i < n; ++i) rotated[i] = std::polar(1.0, w[i] * tau / p.nu) * a.amp[i];
  const ComplexVector P = nonlinearity(rotated, p);
  FieldState out = a;
  out.tau = tau;
  for (std::size_t i = 0; i < n; ++i) out.amp[i] = std::polar(1.0, -w[i] * tau / p.nu) * P[i] - p.damping[i] * a.amp[i];
  if (a.real) mirror_real(out.amp, a.box);
  return out;
}

EffectiveNonlinearity::EffectiveNonlinearity(const ModelParams& p, const std::vector<ResonantTuple>& tuples,
                                             TupleCheck check)
    : box_(p.box()), model_(model_name(p.model)) {
  const Dispersion disp = model_dispersion(p.model);
  auto index = [&](const WaveVector& k) {
    if (!box_.contains(k)) throw CutoffMismatch("tuple member " + to_string(k) + " lies outside the cutoff box");
    return static_cast<std::uint32_t>(box_.index(k));
  };
  auto verify = [&](const ResonantTuple& t) {
    if (!momentum_match(t.inputs, t.outputs))
      throw std::invalid_argument("tuple violates momentum matching; built for another model?");
    if (check == TupleCheck::Resonant && !frequency_match(disp, t.inputs, t.outputs))
      throw std::invalid_argument("tuple violates frequency matching for this dispersion");
  };

  if (const auto* nls = std::get_if<NlsModel>(&p.model)) {
    nls_diagonal_ = true;
    delta_ = nls->delta;
    for (const auto& t : tuples) {
      if (t.inputs.size() != 2 || t.outputs.size() != 2 || t.kind != ResonanceKind::NlsQuadruple)
        throw std::invalid_argument("NLS effective equation needs quadruple tuples");
      verify(t);
      auto in = t.inputs;
      auto outs = t.outputs;
      std::sort(in.begin(), in.end());
      std::sort(outs.begin(), outs.end());
      if (in == outs) throw std::invalid_argument("trivial tuple in list; diagonal terms are added in closed form");
      const double mult = t.inputs[0] == t.inputs[1] ? 1.0 : 2.0;
      cubic_.push_back({index(t.target()), index(t.inputs[0]), index(t.inputs[1]), index(t.outputs[0]),
                        Complex(0.0, mult * nls->delta)});
    }
  } else {
    const ChmShape shape = chm_shape(std::get<ChmModel>(p.model));
    for (const auto& t : tuples) {
      if (t.inputs.size() != 2 || t.outputs.size() != 1 || t.kind == ResonanceKind::NlsQuadruple)
        throw std::invalid_argument("CHM effective equation needs triad tuples");
      verify(t);
      const auto& k1 = t.inputs[0];
      const auto& k2 = t.inputs[1];
      const double cross = static_cast<double>(k1.m()) * k2.n() - static_cast<double>(k1.n()) * k2.m();
      const double c = shape.prefactor(t.target()) * cross * (shape.weight(k1) - shape.weight(k2));
      if (c == 0.0) continue;
      quadratic_.push_back({index(t.target()), index(k1), index(k2), Complex(c, 0.0)});
    }
  }
  auto by_target = [](const auto& a, const auto& b) { return a.target < b.target; };
  std::stable_sort(cubic_.begin(), cubic_.end(), by_target);
  std::stable_sort(quadratic_.begin(), quadratic_.end(), by_target);
}

ComplexVector EffectiveNonlinearity::operator()(const ComplexVector& a) const {
  if (a.size() != box_.size()) throw CutoffMismatch("amplitude vector does not match the resonance box");
  ComplexVector out(a.size());
  if (nls_diagonal_) {
    double total = 0.0;
    for (const auto& z : a) total += std::norm(z);
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = Complex(0.0, delta_) * a[i] * (2.0 * total - std::norm(a[i]));
  }
  for (const auto& t : cubic_) out[t.target] += t.coef * a[t.i1] * a[t.i2] * std::conj(a[t.i3]);
  for (const auto& t : quadratic_) out[t.target] += t.coef * a[t.i1] * a[t.i2];
  if (model_ == "chm") mirror_real(out, box_);
  return out;
}

FieldState effective_rhs(const FieldState& a, const ModelParams& p, const EffectiveNonlinearity& resonant) {
  require_box(a, p);
  if (resonant.box() != a.box) throw CutoffMismatch("resonance table was built for a different cutoff");
  FieldState out = a;
  out.amp = resonant(a.amp);
  for (std::size_t i = 0; i < out.amp.size(); ++i) out.amp[i] -= p.damping[i] * a.amp[i];
  if (a.real) mirror_real(out.amp, a.box);
  return out;
}

FieldState effective_rhs(const FieldState& a, const ModelParams& p, const std::vector<ResonantTuple>& tuples) {
  return effective_rhs(a, p, EffectiveNonlinearity(p, tuples));
}

double dissipation_sign(const FieldState& v, const ModelParams& p) {
  require_box(v, p);
  const ComplexVector P = nonlinearity(v.amp, p);
  double s = 0.0;
  for (std::size_t i = 0; i < P.size(); ++i) s += (P[i] * std::conj(v.amp[i])).real();
  return s;
}

double weighted_dissipation(const FieldState& v, const ModelParams& p) {
  require_box(v, p);
  const ComplexVector P = nonlinearity(v.amp, p);
  const auto* chm = std::get_if<ChmModel>(&p.model);
  const ChmShape shape = chm ? chm_shape(*chm) : ChmShape{1.0, 1.0, 0.0};
  double s = 0.0;
  for (std::size_t i = 0; i < P.size(); ++i) {
    const double w = chm ? shape.denom(v.box.vector(i)) : 1.0;
    s += w * (P[i] * std::conj(v.amp[i])).real();
  }
  return s;
}

}  // namespace effeq
