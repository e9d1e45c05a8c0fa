#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ftdo/bits.hpp"
#include "ftdo/l0_sampler.hpp"

namespace ftdo {

struct RecoveryResult {
  std::vector<std::uint64_t> elements; ///< verified support elements, sorted
  bool complete = false;                ///< true if peeling emptied the table
};

/// Randomized s-sparse recovery: a hashed table of 1-sparse testers decoded by
/// peeling. Every reported element passes a fingerprint check, so partial
/// decodes never contain non-support elements (up to fingerprint collisions).
class SparseRecovery {
public:
  static constexpr std::size_t kRows = 4;

  SparseRecovery() = default;
  SparseRecovery(std::uint64_t u, std::size_t s, std::uint64_t seed);

  std::size_t capacity() const { return s_; }
  void update(std::uint64_t e, int sign);
  RecoveryResult recover() const;

  void write_body(BitWriter &w) const;
  void read_body(BitReader &r);

  friend bool operator==(const SparseRecovery &a, const SparseRecovery &b) {
    return a.seed_ == b.seed_ && a.cells_ == b.cells_;
  }

private:
  std::size_t bucket(std::size_t row, std::uint64_t e) const;

  std::uint64_t u_ = 0;
  std::size_t s_ = 0;
  std::size_t width_ = 0;
  std::uint64_t seed_ = 0;
  std::uint64_t fp_base_ = 2;
  std::vector<OneSparse> cells_;
};

} // namespace ftdo
