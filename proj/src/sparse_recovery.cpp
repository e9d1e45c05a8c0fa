#include "ftdo/sparse_recovery.hpp"

#include <algorithm>

#include "ftdo/error.hpp"
#include "ftdo/hashing.hpp"

namespace ftdo {

SparseRecovery::SparseRecovery(std::uint64_t u, std::size_t s, std::uint64_t seed)
    : u_(u), s_(s), width_(std::max<std::size_t>(4, 2 * s + 2)), seed_(seed),
      fp_base_(2 + derive_seed(seed, {0xF1}) % (kMersenne61 - 3)), cells_(kRows * width_) {}

std::size_t SparseRecovery::bucket(std::size_t row, std::uint64_t e) const {
  return static_cast<std::size_t>(splitmix64(e ^ derive_seed(seed_, {row})) % width_);
}

void SparseRecovery::update(std::uint64_t e, int sign) {
  if (e >= u_)
    throw Error(ErrorCode::OutOfRange, "element " + std::to_string(e) + " outside universe");
  const std::uint64_t rp = mersenne_pow(fp_base_, e);
  for (std::size_t row = 0; row < kRows; ++row)
    cells_[row * width_ + bucket(row, e)].update(e, sign, rp);
}

RecoveryResult SparseRecovery::recover() const {
  auto cells = cells_;
  RecoveryResult out;
  bool progress = true;
  while (progress) {
    progress = false;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (cells[i].is_zero())
        continue;
      const auto e = cells[i].recover(u_, fp_base_);
      if (!e || cells[i].count != 1)
        continue;
      out.elements.push_back(*e);
      const std::uint64_t rp = mersenne_pow(fp_base_, *e);
      for (std::size_t row = 0; row < kRows; ++row)
        cells[row * width_ + bucket(row, *e)].update(*e, -1, rp);
      progress = true;
    }
  }
  out.complete = std::all_of(cells.begin(), cells.end(), [](const OneSparse &c) { return c.is_zero(); });
  std::sort(out.elements.begin(), out.elements.end());
  out.elements.erase(std::unique(out.elements.begin(), out.elements.end()), out.elements.end());
  return out;
}

void SparseRecovery::write_body(BitWriter &w) const {
  for (const auto &c : cells_)
    c.write(w);
}

void SparseRecovery::read_body(BitReader &r) {
  for (auto &c : cells_)
    c.read(r);
}

} // namespace ftdo
