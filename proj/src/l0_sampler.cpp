#include "ftdo/l0_sampler.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "ftdo/error.hpp"
#include "ftdo/hashing.hpp"

namespace ftdo {

std::uint64_t mersenne_mul(std::uint64_t a, std::uint64_t b) {
  const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  std::uint64_t lo = static_cast<std::uint64_t>(p & kMersenne61);
  std::uint64_t hi = static_cast<std::uint64_t>(p >> 61);
  std::uint64_t s = lo + hi;
  if (s >= kMersenne61)
    s -= kMersenne61;
  return s;
}

std::uint64_t mersenne_pow(std::uint64_t base, std::uint64_t exp) {
  std::uint64_t result = 1;
  base %= kMersenne61;
  while (exp > 0) {
    if (exp & 1U)
      result = mersenne_mul(result, base);
    base = mersenne_mul(base, base);
    exp >>= 1;
  }
  return result;
}

void OneSparse::update(std::uint64_t e, int sign, std::uint64_t r_pow_e) {
  count += sign;
  id_sum += sign * static_cast<std::int64_t>(e);
  fingerprint = sign > 0 ? (fingerprint + r_pow_e) % kMersenne61
                         : (fingerprint + kMersenne61 - r_pow_e) % kMersenne61;
}

void OneSparse::merge(const OneSparse &other) {
  count += other.count;
  id_sum += other.id_sum;
  fingerprint = (fingerprint + other.fingerprint) % kMersenne61;
}

std::optional<std::uint64_t> OneSparse::recover(std::uint64_t u, std::uint64_t r) const {
  if (count == 0 || id_sum % count != 0)
    return std::nullopt;
  const std::int64_t e = id_sum / count;
  if (e < 0 || static_cast<std::uint64_t>(e) >= u)
    return std::nullopt;
  const std::uint64_t c = count > 0 ? static_cast<std::uint64_t>(count) % kMersenne61
                                    : kMersenne61 - static_cast<std::uint64_t>(-count) % kMersenne61;
  if (mersenne_mul(c, mersenne_pow(r, static_cast<std::uint64_t>(e))) != fingerprint)
    return std::nullopt;
  return static_cast<std::uint64_t>(e);
}

void OneSparse::write(BitWriter &w) const {
  w.write_i64(count);
  w.write_i64(id_sum);
  w.write(fingerprint, 61);
}

void OneSparse::read(BitReader &r) {
  count = r.read_i64();
  id_sum = r.read_i64();
  fingerprint = r.read(61);
}

L0Sketch::L0Sketch(std::uint64_t u, double delta, std::uint64_t seed)
    : u_(u), delta_(delta), seed_(seed) {
  if (!(delta > 0.0 && delta < 1.0))
    throw Error(ErrorCode::OutOfRange, "delta must lie in (0,1)");
  copies_ = static_cast<std::size_t>(std::max(1.0, std::ceil(std::log2(1.0 / delta))));
  levels_ = static_cast<std::size_t>(std::bit_width(u > 1 ? u - 1 : 1)) + 1;
  for (std::size_t c = 0; c < copies_; ++c) {
    hash_keys_.push_back(derive_seed(seed, {c, 1}));
    fp_bases_.push_back(2 + derive_seed(seed, {c, 2}) % (kMersenne61 - 3));
  }
  cells_.assign(copies_ * levels_, OneSparse{});
}

std::size_t L0Sketch::level_of(std::size_t copy, std::uint64_t e) const {
  const std::uint64_t h = splitmix64(e ^ hash_keys_[copy]);
  return std::min<std::size_t>(static_cast<std::size_t>(std::countl_zero(h)), levels_ - 1);
}

void L0Sketch::update(std::uint64_t e, int sign) {
  if (e >= u_)
    throw Error(ErrorCode::OutOfRange, "element " + std::to_string(e) + " outside universe");
  for (std::size_t c = 0; c < copies_; ++c) {
    const std::size_t top = level_of(c, e);
    const std::uint64_t rp = mersenne_pow(fp_bases_[c], e);
    for (std::size_t l = 0; l <= top; ++l)
      cells_[c * levels_ + l].update(e, sign, rp);
  }
}

void L0Sketch::merge(const L0Sketch &other) {
  if (other.u_ != u_ || other.seed_ != seed_ || other.copies_ != copies_)
    throw Error(ErrorCode::OutOfRange, "merging l0 sketches with different parameters");
  for (std::size_t i = 0; i < cells_.size(); ++i)
    cells_[i].merge(other.cells_[i]);
}

bool L0Sketch::is_zero() const {
  return std::all_of(cells_.begin(), cells_.end(), [](const OneSparse &c) { return c.is_zero(); });
}

L0Sample L0Sketch::sample() const {
  bool any_nonzero = false;
  for (std::size_t c = 0; c < copies_; ++c) {
    std::size_t deepest = levels_;
    for (std::size_t l = levels_; l-- > 0;)
      if (!cells_[c * levels_ + l].is_zero()) {
        deepest = l;
        break;
      }
    if (deepest == levels_)
      continue;
    any_nonzero = true;
    if (auto e = cells_[c * levels_ + deepest].recover(u_, fp_bases_[c]))
      return {L0Sample::Kind::Element, *e};
  }
  return {any_nonzero ? L0Sample::Kind::Bottom : L0Sample::Kind::Empty, 0};
}

void L0Sketch::write_body(BitWriter &w) const {
  for (const auto &c : cells_)
    c.write(w);
}

void L0Sketch::read_body(BitReader &r) {
  for (auto &c : cells_)
    c.read(r);
}

std::vector<std::uint8_t> L0Sketch::serialize() const {
  BitWriter w;
  write_header(w, ArtifactKind::L0Sketch);
  w.write_u64(u_);
  w.write_u64(std::bit_cast<std::uint64_t>(delta_));
  w.write_u64(seed_);
  write_body(w);
  return w.bytes();
}

L0Sketch L0Sketch::deserialize(std::span<const std::uint8_t> bytes) {
  BitReader r(bytes);
  read_header(r, ArtifactKind::L0Sketch);
  const std::uint64_t u = r.read_u64();
  const double delta = std::bit_cast<double>(r.read_u64());
  const std::uint64_t seed = r.read_u64();
  if (!(delta > 0.0 && delta < 1.0))
    throw Error(ErrorCode::CorruptData, "bad delta");
  L0Sketch s(u, delta, seed);
  s.read_body(r);
  return s;
}

} // namespace ftdo
