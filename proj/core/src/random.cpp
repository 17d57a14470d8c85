#include "effeq/random.hpp"

#include <cmath>
#include <numbers>

namespace effeq {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> c, std::array<std::uint32_t, 2> k) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      k[0] += kWeyl0;
      k[1] += kWeyl1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, c[0], hi0, lo0);
    mulhilo(kMul1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
  return c;
}

double uniform_open(std::uint64_t bits) {
  // 52 random bits centred in their cell; with 53 the top cell rounds to 1.
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

std::array<double, 2> gaussian_pair(const std::array<std::uint32_t, 4>& b) {
  const double u1 = uniform_open((static_cast<std::uint64_t>(b[0]) << 32) | b[1]);
  const double u2 = uniform_open((static_cast<std::uint64_t>(b[2]) << 32) | b[3]);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double t = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(t), r * std::sin(t)};
}

std::array<double, 2> noise_pair(std::uint64_t seed, std::uint32_t trajectory, std::uint32_t mode, std::uint64_t step,
                                 std::uint32_t substep) {
  const std::array<std::uint32_t, 2> key{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  const std::array<std::uint32_t, 4> counter{static_cast<std::uint32_t>(step),
                                             static_cast<std::uint32_t>(step >> 32) ^ (substep << 24), mode,
                                             trajectory};
  return gaussian_pair(philox4x32(counter, key));
}

PhiloxEngine::PhiloxEngine(std::uint64_t seed, std::uint64_t stream)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      stream_hi_(static_cast<std::uint32_t>(stream >> 32)),
      stream_lo_(static_cast<std::uint32_t>(stream)) {}

void PhiloxEngine::refill() {
  // Stream id occupies the upper counter words; the block index the lower.
  buffer_ = philox4x32({static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32), stream_lo_,
                        stream_hi_ ^ 0x80000000u},
                       key_);
  ++block_;
  used_ = 0;
}

PhiloxEngine::result_type PhiloxEngine::operator()() {
  if (used_ >= 4) refill();
  const std::uint64_t hi = buffer_[static_cast<std::size_t>(used_)];
  const std::uint64_t lo = buffer_[static_cast<std::size_t>(used_ + 1)];
  used_ += 2;
  return (hi << 32) | lo;
}

double PhiloxEngine::uniform() { return uniform_open((*this)()); }

double PhiloxEngine::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double t = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(t);
  has_spare_ = true;
  return r * std::cos(t);
}

void PhiloxEngine::seek(std::uint64_t block_index) {
  block_ = block_index;
  used_ = 4;
  has_spare_ = false;
}

}  // namespace effeq
