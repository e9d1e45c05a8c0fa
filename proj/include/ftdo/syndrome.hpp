#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ftdo/bits.hpp"

namespace ftdo {

/// Deterministic k-sparse recovery over the universe [0, u).
///
/// z_j = sum_e c_e * e^j mod q for j = 0..2k, where q is the smallest prime
/// >= u. Row 0 is the plain count so element 0 (whose locator is 0) is still
/// identifiable.
class SyndromeSketch {
public:
  SyndromeSketch() = default;
  SyndromeSketch(std::uint64_t u, std::uint32_t k);
  /// Shares an already chosen prime, avoiding a primality search per sketch.
  SyndromeSketch(std::uint64_t u, std::uint32_t k, std::uint64_t q);

  std::uint64_t universe() const { return u_; }
  std::uint32_t k() const { return k_; }
  std::uint64_t modulus() const { return q_; }
  std::span<const std::uint64_t> syndrome() const { return z_; }
  bool is_zero() const;

  /// z <- z + sign * g(e). Throws OutOfRange for e >= u.
  void update(std::uint64_t e, int sign);
  /// Componentwise state addition; parameters must match.
  void merge(const SyndromeSketch &other, int sign = 1);

  /// Support of the net 0/1 vector when it has weight <= k, otherwise
  /// nullopt. The returned set always re-encodes to exactly this syndrome.
  std::optional<std::vector<std::uint64_t>> decode() const;
  /// As decode(), but the locator root search only visits `candidates`
  /// (plus element 0 via the count row). Correct whenever the true support
  /// lies inside candidates.
  std::optional<std::vector<std::uint64_t>> decode(std::span<const std::uint64_t> candidates) const;

  /// Body only: (2k+1) elements of bits_for(q) bits each.
  void write_body(BitWriter &w) const;
  void read_body(BitReader &r);
  /// Standalone layout: header, u (64), k (32), q (64), body.
  std::vector<std::uint8_t> serialize() const;
  static SyndromeSketch deserialize(std::span<const std::uint8_t> bytes);
  std::uint64_t body_bits() const { return static_cast<std::uint64_t>(2 * k_ + 1) * bits_for(q_); }

  friend bool operator==(const SyndromeSketch &, const SyndromeSketch &) = default;

private:
  std::optional<std::vector<std::uint64_t>> decode_impl(std::span<const std::uint64_t> candidates,
                                                         bool full_scan) const;
  bool matches(std::span<const std::uint64_t> support) const;

  std::uint64_t u_ = 0;
  std::uint32_t k_ = 0;
  std::uint64_t q_ = 2;
  std::vector<std::uint64_t> z_;
};

/// Syndrome of a set, for tests and re-encoding.
std::vector<std::uint64_t> encode_syndrome(std::uint64_t u, std::uint32_t k, std::uint64_t q,
                                           std::span<const std::uint64_t> support);

} // namespace ftdo
