#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace effeq {

/// Philox4x32-10 block function (counter-based, stateless).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

/// Uniform in (0, 1) from 64 random bits (never returns 0 or 1).
double uniform_open(std::uint64_t bits);

/// Two independent standard normals from one Philox block (Box-Muller).
std::array<double, 2> gaussian_pair(const std::array<std::uint32_t, 4>& block);

/// Noise address: one complex Gaussian per (seed, trajectory, mode, step,
/// substep). Any evaluation order yields the same values.
std::array<double, 2> noise_pair(std::uint64_t seed, std::uint32_t trajectory, std::uint32_t mode, std::uint64_t step,
                                 std::uint32_t substep = 0);

/// Sequential generator on a private Philox stream, usable as a standard
/// UniformRandomBitGenerator.
class PhiloxEngine {
 public:
  using result_type = std::uint64_t;

  PhiloxEngine(std::uint64_t seed, std::uint64_t stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

  double uniform();  // (0, 1)
  double normal();
  /// Skips to a fresh block boundary at the given position of this stream.
  void seek(std::uint64_t block_index);

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::uint32_t stream_hi_;
  std::uint32_t stream_lo_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace effeq
