#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ftdo/bits.hpp"

namespace ftdo {

/// Exact 1-sparse tester: count, weighted id sum and a polynomial
/// fingerprint sum c_e * r^e over the Mersenne prime 2^61 - 1.
struct OneSparse {
  std::int64_t count = 0;
  std::int64_t id_sum = 0;
  std::uint64_t fingerprint = 0;

  void update(std::uint64_t e, int sign, std::uint64_t r_pow_e);
  void merge(const OneSparse &other);
  bool is_zero() const { return count == 0 && id_sum == 0 && fingerprint == 0; }
  /// The unique element if the tested vector is c * 1_e with c != 0.
  std::optional<std::uint64_t> recover(std::uint64_t u, std::uint64_t r) const;

  void write(BitWriter &w) const;
  void read(BitReader &r);

  friend bool operator==(const OneSparse &, const OneSparse &) = default;
};

inline constexpr std::uint64_t kMersenne61 = (std::uint64_t{1} << 61) - 1;
std::uint64_t mersenne_mul(std::uint64_t a, std::uint64_t b);
std::uint64_t mersenne_pow(std::uint64_t base, std::uint64_t exp);

struct L0Sample {
  enum class Kind { Element, Empty, Bottom } kind = Kind::Bottom;
  std::uint64_t element = 0;
};

/// Linear l0-sampler over [0, u). ceil(log2(1/delta)) independent copies,
/// each with ceil(log2 u)+1 nested subsampling levels.
class L0Sketch {
public:
  L0Sketch() = default;
  L0Sketch(std::uint64_t u, double delta, std::uint64_t seed);

  std::uint64_t universe() const { return u_; }
  double delta() const { return delta_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t copies() const { return copies_; }
  std::size_t levels() const { return levels_; }

  /// Throws OutOfRange for e >= u.
  void update(std::uint64_t e, int sign);
  /// State addition; seeds and parameters must agree.
  void merge(const L0Sketch &other);
  L0Sample sample() const;
  bool is_zero() const;

  void write_body(BitWriter &w) const;
  void read_body(BitReader &r);
  std::vector<std::uint8_t> serialize() const;
  static L0Sketch deserialize(std::span<const std::uint8_t> bytes);

  friend bool operator==(const L0Sketch &a, const L0Sketch &b) {
    return a.u_ == b.u_ && a.seed_ == b.seed_ && a.copies_ == b.copies_ && a.cells_ == b.cells_;
  }

private:
  std::size_t level_of(std::size_t copy, std::uint64_t e) const;

  std::uint64_t u_ = 0;
  double delta_ = 0.5;
  std::uint64_t seed_ = 0;
  std::size_t copies_ = 0;
  std::size_t levels_ = 0;
  std::vector<std::uint64_t> hash_keys_;
  std::vector<std::uint64_t> fp_bases_;
  std::vector<OneSparse> cells_; ///< copies_ x levels_
};

} // namespace ftdo
