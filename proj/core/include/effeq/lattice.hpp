#pragma once

#include "effeq/rational.hpp"

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace effeq {

inline constexpr int kMaxDim = 4;

/// Integer lattice mode index k in Z^d, 1 <= d <= kMaxDim.
/// For CHM (d = 2) the components are named m (zonal) and n (meridional).
class WaveVector {
 public:
  WaveVector() = default;
  WaveVector(std::initializer_list<int> components);
  explicit WaveVector(std::span<const int> components);
  static WaveVector zero(int dim);

  int dim() const { return dim_; }
  int operator[](int i) const { return c_[static_cast<std::size_t>(i)]; }
  int& operator[](int i) { return c_[static_cast<std::size_t>(i)]; }
  std::span<const int> components() const { return {c_.data(), static_cast<std::size_t>(dim_)}; }

  int m() const { return c_[0]; }
  int n() const { return c_[1]; }

  std::int64_t norm2() const;
  int sup_norm() const;
  bool is_zero() const;

  WaveVector operator-() const;
  WaveVector& operator+=(const WaveVector& o);
  WaveVector& operator-=(const WaveVector& o);
  friend WaveVector operator+(WaveVector a, const WaveVector& b) { return a += b; }
  friend WaveVector operator-(WaveVector a, const WaveVector& b) { return a -= b; }

  friend bool operator==(const WaveVector& a, const WaveVector& b) {
    return a.dim_ == b.dim_ && a.c_ == b.c_;
  }
  friend std::strong_ordering operator<=>(const WaveVector& a, const WaveVector& b) {
    if (auto c = a.dim_ <=> b.dim_; c != 0) return c;
    return a.c_ <=> b.c_;
  }

 private:
  std::array<int, kMaxDim> c_{};
  int dim_ = 0;
};

std::int64_t dot(const WaveVector& a, const WaveVector& b);
std::string to_string(const WaveVector& k);

/// Throws DimensionMismatch unless a.dim() == b.dim().
void require_same_dim(const WaveVector& a, const WaveVector& b);

/// omega_k = |k|^2 / L^2.
struct NlsDispersion {
  int dim = 2;
  Rational box_size{1};
};

/// omega_k = -m rho / (m^2 + n^2 rho^2 + F rho^2), k = (m, n).
struct ChmDispersion {
  Rational rho{1};
  Rational froude{0};
};

/// Tabulated floating-point frequencies; only these use a tolerance.
struct CustomDispersion {
  int dim = 2;
  std::map<WaveVector, double> table;
  double tolerance = 1e-12;
};

using Dispersion = std::variant<NlsDispersion, ChmDispersion, CustomDispersion>;

int dispersion_dim(const Dispersion& disp);

/// Exact frequency. Throws std::domain_error for custom (floating) tables and
/// DimensionMismatch when k does not match the law.
Rational omega(const Dispersion& disp, const WaveVector& k);

/// Floating value of omega_k; the only route for custom tables.
double omega_value(const Dispersion& disp, const WaveVector& k);

/// Sum of inputs == sum of outputs, componentwise.
bool momentum_match(std::span<const WaveVector> inputs, std::span<const WaveVector> outputs);

/// Sum of omega over inputs == sum over outputs, decided exactly for NLS and
/// CHM (the common factors 1/L^2 and rho cancel and are dropped).
bool frequency_match(const Dispersion& disp, std::span<const WaveVector> inputs,
                     std::span<const WaveVector> outputs);

/// The cube [-K, K]^d with a dense index.
class LatticeBox {
 public:
  LatticeBox() = default;
  LatticeBox(int dim, int cutoff);

  int dim() const { return dim_; }
  int cutoff() const { return cutoff_; }
  std::size_t size() const { return size_; }
  int side() const { return 2 * cutoff_ + 1; }

  bool contains(const WaveVector& k) const;
  /// Dense index of k; k must lie in the box.
  std::size_t index(const WaveVector& k) const;
  WaveVector vector(std::size_t index) const;
  std::size_t index_of_negative(std::size_t index) const { return size_ - 1 - index; }

  friend bool operator==(const LatticeBox&, const LatticeBox&) = default;

 private:
  int dim_ = 0;
  int cutoff_ = 0;
  std::size_t size_ = 0;
};

/// Canonical member of {k, -k}: the one whose first nonzero component is positive.
WaveVector conjugate_representative(const WaveVector& k);

}  // namespace effeq

template <>
struct std::hash<effeq::WaveVector> {
  std::size_t operator()(const effeq::WaveVector& k) const noexcept {
    std::size_t h = static_cast<std::size_t>(k.dim());
    for (int c : k.components()) h = h * 1000003u ^ static_cast<std::size_t>(c + 0x9e3779b9);
    return h;
  }
};
