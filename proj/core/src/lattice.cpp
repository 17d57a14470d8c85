#include "effeq/lattice.hpp"

#include "effeq/errors.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

namespace effeq {

WaveVector::WaveVector(std::initializer_list<int> components)
    : WaveVector(std::span<const int>(components.begin(), components.size())) {}

WaveVector::WaveVector(std::span<const int> components) {
  if (components.empty() || components.size() > static_cast<std::size_t>(kMaxDim)) {
    throw DimensionMismatch("wave vector dimension must be in [1, " + std::to_string(kMaxDim) + "]");
  }
  dim_ = static_cast<int>(components.size());
  for (std::size_t i = 0; i < components.size(); ++i) c_[i] = components[i];
}

WaveVector WaveVector::zero(int dim) {
  if (dim < 1 || dim > kMaxDim) throw DimensionMismatch("bad dimension " + std::to_string(dim));
  WaveVector k;
  k.dim_ = dim;
  return k;
}

std::int64_t WaveVector::norm2() const {
  std::int64_t s = 0;
  for (int i = 0; i < dim_; ++i) s += static_cast<std::int64_t>(c_[i]) * c_[i];
  return s;
}

int WaveVector::sup_norm() const {
  int s = 0;
  for (int i = 0; i < dim_; ++i) s = std::max(s, std::abs(c_[i]));
  return s;
}

bool WaveVector::is_zero() const {
  for (int i = 0; i < dim_; ++i)
    if (c_[i] != 0) return false;
  return true;
}

WaveVector WaveVector::operator-() const {
  WaveVector r = *this;
  for (int i = 0; i < dim_; ++i) r.c_[i] = -c_[i];
  return r;
}

WaveVector& WaveVector::operator+=(const WaveVector& o) {
  require_same_dim(*this, o);
  for (int i = 0; i < dim_; ++i) c_[i] += o.c_[i];
  return *this;
}

WaveVector& WaveVector::operator-=(const WaveVector& o) {
  require_same_dim(*this, o);
  for (int i = 0; i < dim_; ++i) c_[i] -= o.c_[i];
  return *this;
}

std::int64_t dot(const WaveVector& a, const WaveVector& b) {
  require_same_dim(a, b);
  std::int64_t s = 0;
  for (int i = 0; i < a.dim(); ++i) s += static_cast<std::int64_t>(a[i]) * b[i];
  return s;
}

std::string to_string(const WaveVector& k) {
  std::ostringstream os;
  os << '(';
  for (int i = 0; i < k.dim(); ++i) os << (i ? "," : "") << k[i];
  os << ')';
  return os.str();
}

void require_same_dim(const WaveVector& a, const WaveVector& b) {
  if (a.dim() != b.dim()) {
    throw DimensionMismatch("dimension mismatch: " + to_string(a) + " vs " + to_string(b));
  }
}

int dispersion_dim(const Dispersion& disp) {
  struct {
    int operator()(const NlsDispersion& d) const { return d.dim; }
    int operator()(const ChmDispersion&) const { return 2; }
    int operator()(const CustomDispersion& d) const { return d.dim; }
  } visitor;
  return std::visit(visitor, disp);
}

namespace {

void check_dim(const Dispersion& disp, const WaveVector& k) {
  if (k.dim() != dispersion_dim(disp)) {
    throw DimensionMismatch("wave vector " + to_string(k) + " does not match dispersion dimension " +
                            std::to_string(dispersion_dim(disp)));
  }
}

// m / (m^2 + (n^2 + F) rho^2); omega = -rho * this.
Rational chm_reduced(const ChmDispersion& d, const Rational& rho2, const WaveVector& k) {
  if (k.m() == 0) return Rational(0);
  const Rational den = Rational(static_cast<std::int64_t>(k.m()) * k.m()) +
                       (Rational(static_cast<std::int64_t>(k.n()) * k.n()) + d.froude) * rho2;
  return Rational(k.m()) / den;
}

void check_all(const Dispersion& disp, std::span<const WaveVector> a, std::span<const WaveVector> b) {
  for (const auto& k : a) check_dim(disp, k);
  for (const auto& k : b) check_dim(disp, k);
}

}  // namespace

Rational omega(const Dispersion& disp, const WaveVector& k) {
  check_dim(disp, k);
  if (const auto* nls = std::get_if<NlsDispersion>(&disp)) {
    return Rational(k.norm2()) / (nls->box_size * nls->box_size);
  }
  if (const auto* chm = std::get_if<ChmDispersion>(&disp)) {
    return -chm->rho * chm_reduced(*chm, chm->rho * chm->rho, k);
  }
  throw std::domain_error("custom floating dispersion has no exact frequency; use omega_value");
}

double omega_value(const Dispersion& disp, const WaveVector& k) {
  if (const auto* custom = std::get_if<CustomDispersion>(&disp)) {
    check_dim(disp, k);
    auto it = custom->table.find(k);
    if (it == custom->table.end()) throw std::out_of_range("no tabulated frequency for " + to_string(k));
    return it->second;
  }
  if (const auto* chm = std::get_if<ChmDispersion>(&disp)) {
    check_dim(disp, k);
    const double rho = to_double(chm->rho);
    const double m = k.m();
    const double n = k.n();
    const double den = m * m + (n * n + to_double(chm->froude)) * rho * rho;
    return m == 0.0 ? 0.0 : -m * rho / den;
  }
  return to_double(omega(disp, k));
}

bool momentum_match(std::span<const WaveVector> inputs, std::span<const WaveVector> outputs) {
  if (inputs.empty() && outputs.empty()) return true;
  const int dim = !inputs.empty() ? inputs.front().dim() : outputs.front().dim();
  WaveVector sum = WaveVector::zero(dim);
  for (const auto& k : inputs) sum += k;
  for (const auto& k : outputs) sum -= k;
  return sum.is_zero();
}

bool frequency_match(const Dispersion& disp, std::span<const WaveVector> inputs,
                     std::span<const WaveVector> outputs) {
  check_all(disp, inputs, outputs);
  if (std::holds_alternative<NlsDispersion>(disp)) {
    std::int64_t s = 0;
    for (const auto& k : inputs) s += k.norm2();
    for (const auto& k : outputs) s -= k.norm2();
    return s == 0;
  }
  if (const auto* chm = std::get_if<ChmDispersion>(&disp)) {
    const Rational rho2 = chm->rho * chm->rho;
    Rational s = 0;
    for (const auto& k : inputs) s += chm_reduced(*chm, rho2, k);
    for (const auto& k : outputs) s -= chm_reduced(*chm, rho2, k);
    return s == 0;
  }
  const auto& custom = std::get<CustomDispersion>(disp);
  double s = 0.0;
  for (const auto& k : inputs) s += omega_value(disp, k);
  for (const auto& k : outputs) s -= omega_value(disp, k);
  return std::abs(s) <= custom.tolerance;
}

LatticeBox::LatticeBox(int dim, int cutoff) : dim_(dim), cutoff_(cutoff) {
  if (dim < 1 || dim > kMaxDim) throw DimensionMismatch("bad lattice dimension " + std::to_string(dim));
  if (cutoff < 0) throw std::invalid_argument("cutoff must be nonnegative");
  size_ = 1;
  for (int i = 0; i < dim; ++i) size_ *= static_cast<std::size_t>(side());
}

bool LatticeBox::contains(const WaveVector& k) const {
  return k.dim() == dim_ && k.sup_norm() <= cutoff_;
}

std::size_t LatticeBox::index(const WaveVector& k) const {
  std::size_t idx = 0;
  for (int i = 0; i < dim_; ++i) idx = idx * static_cast<std::size_t>(side()) + static_cast<std::size_t>(k[i] + cutoff_);
  return idx;
}

WaveVector LatticeBox::vector(std::size_t index) const {
  WaveVector k = WaveVector::zero(dim_);
  const auto s = static_cast<std::size_t>(side());
  for (int i = dim_ - 1; i >= 0; --i) {
    k[i] = static_cast<int>(index % s) - cutoff_;
    index /= s;
  }
  return k;
}

WaveVector conjugate_representative(const WaveVector& k) {
  for (int i = 0; i < k.dim(); ++i) {
    if (k[i] > 0) return k;
    if (k[i] < 0) return -k;
  }
  return k;
}

}  // namespace effeq
