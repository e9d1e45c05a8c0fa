#include "ftdo/syndrome.hpp"

#include <algorithm>

#include "ftdo/error.hpp"
#include "ftdo/field.hpp"

namespace ftdo {

namespace {

/// Solves M x = rhs over F_q by Gaussian elimination; nullopt if singular.
std::optional<std::vector<std::uint64_t>> solve(std::vector<std::vector<std::uint64_t>> m,
                                                std::vector<std::uint64_t> rhs, std::uint64_t q) {
  const std::size_t n = rhs.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && m[pivot][col] == 0)
      ++pivot;
    if (pivot == n)
      return std::nullopt;
    std::swap(m[pivot], m[col]);
    std::swap(rhs[pivot], rhs[col]);
    const std::uint64_t inv = inv_mod(m[col][col], q);
    for (std::size_t j = col; j < n; ++j)
      m[col][j] = mul_mod(m[col][j], inv, q);
    rhs[col] = mul_mod(rhs[col], inv, q);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || m[r][col] == 0)
        continue;
      const std::uint64_t factor = m[r][col];
      for (std::size_t j = col; j < n; ++j)
        m[r][j] = sub_mod(m[r][j], mul_mod(factor, m[col][j], q), q);
      rhs[r] = sub_mod(rhs[r], mul_mod(factor, rhs[col], q), q);
    }
  }
  return rhs;
}

} // namespace

SyndromeSketch::SyndromeSketch(std::uint64_t u, std::uint32_t k)
    : SyndromeSketch(u, k, choose_prime(std::max<std::uint64_t>(u, 2))) {}

SyndromeSketch::SyndromeSketch(std::uint64_t u, std::uint32_t k, std::uint64_t q)
    : u_(u), k_(k), q_(q), z_(2 * static_cast<std::size_t>(k) + 1, 0) {
  if (q < u || q < 2)
    throw Error(ErrorCode::OutOfRange, "modulus smaller than universe");
}

bool SyndromeSketch::is_zero() const {
  return std::all_of(z_.begin(), z_.end(), [](std::uint64_t x) { return x == 0; });
}

void SyndromeSketch::update(std::uint64_t e, int sign) {
  if (e >= u_)
    throw Error(ErrorCode::OutOfRange, "element " + std::to_string(e) + " outside universe");
  std::uint64_t power = 1;
  for (auto &zj : z_) {
    zj = sign > 0 ? add_mod(zj, power, q_) : sub_mod(zj, power, q_);
    power = mul_mod(power, e, q_);
  }
}

void SyndromeSketch::merge(const SyndromeSketch &other, int sign) {
  if (other.u_ != u_ || other.k_ != k_ || other.q_ != q_)
    throw Error(ErrorCode::OutOfRange, "merging sketches with different parameters");
  for (std::size_t j = 0; j < z_.size(); ++j)
    z_[j] = sign > 0 ? add_mod(z_[j], other.z_[j], q_) : sub_mod(z_[j], other.z_[j], q_);
}

std::vector<std::uint64_t> encode_syndrome(std::uint64_t u, std::uint32_t k, std::uint64_t q,
                                           std::span<const std::uint64_t> support) {
  SyndromeSketch s(u, k, q);
  for (std::uint64_t e : support)
    s.update(e, +1);
  return {s.syndrome().begin(), s.syndrome().end()};
}

bool SyndromeSketch::matches(std::span<const std::uint64_t> support) const {
  const auto z = encode_syndrome(u_, k_, q_, support);
  return std::equal(z.begin(), z.end(), z_.begin());
}

std::optional<std::vector<std::uint64_t>> SyndromeSketch::decode() const {
  return decode_impl({}, true);
}

std::optional<std::vector<std::uint64_t>>
SyndromeSketch::decode(std::span<const std::uint64_t> candidates) const {
  return decode_impl(candidates, false);
}

std::optional<std::vector<std::uint64_t>>
SyndromeSketch::decode_impl(std::span<const std::uint64_t> candidates, bool full_scan) const {
  if (is_zero())
    return std::vector<std::uint64_t>{};
  // A 0/1 vector of weight w <= k has z_0 = w. Its nonzero locators number
  // w (element 0 absent) or w - 1 (element 0 present); the Hankel system of
  // power sums is nonsingular exactly at the true locator count.
  const std::uint64_t w = z_[0];
  if (w == 0 && k_ >= u_ && u_ == q_) {
    // Weight q wraps to 0; only the full universe has that weight.
    std::vector<std::uint64_t> all(u_);
    for (std::uint64_t e = 0; e < u_; ++e)
      all[e] = e;
    if (matches(all))
      return all;
    return std::nullopt;
  }
  if (w == 0 || w > k_)
    return std::nullopt;

  std::optional<std::vector<std::uint64_t>> lambda;
  std::size_t nu = w;
  for (;;) {
    if (nu == 0) {
      lambda = std::vector<std::uint64_t>{};
      break;
    }
    std::vector<std::vector<std::uint64_t>> m(nu, std::vector<std::uint64_t>(nu));
    std::vector<std::uint64_t> rhs(nu);
    // Newton: S_{j+nu} + L_1 S_{j+nu-1} + ... + L_nu S_j = 0 for j = 1..nu,
    // unknowns ordered (L_nu, ..., L_1).
    for (std::size_t i = 0; i < nu; ++i) {
      for (std::size_t j = 0; j < nu; ++j)
        m[i][j] = z_[i + j + 1];
      rhs[i] = sub_mod(0, z_[i + nu + 1], q_);
    }
    if (auto x = solve(std::move(m), std::move(rhs), q_)) {
      lambda = std::vector<std::uint64_t>(nu);
      for (std::size_t i = 0; i < nu; ++i)
        (*lambda)[i] = (*x)[nu - 1 - i];
      break;
    }
    if (nu + 1 == w)
      return std::nullopt;
    --nu;
  }

  std::vector<std::uint64_t> support;
  if (nu > 0) {
    // Locators are the roots of x^nu + L_1 x^{nu-1} + ... + L_nu.
    const auto is_root = [&](std::uint64_t e) {
      std::uint64_t acc = 1;
      for (std::size_t i = 0; i < nu; ++i)
        acc = add_mod(mul_mod(acc, e % q_, q_), (*lambda)[i], q_);
      return acc == 0;
    };
    if (full_scan) {
      for (std::uint64_t e = 1; e < u_ && support.size() <= nu; ++e)
        if (is_root(e))
          support.push_back(e);
    } else {
      for (std::uint64_t e : candidates)
        if (e != 0 && e < u_ && is_root(e))
          support.push_back(e);
      std::sort(support.begin(), support.end());
      support.erase(std::unique(support.begin(), support.end()), support.end());
    }
    if (support.size() != nu)
      return std::nullopt;
  }
  if (nu + 1 == w)
    support.insert(support.begin(), 0);
  if (!matches(support))
    return std::nullopt;
  return support;
}

void SyndromeSketch::write_body(BitWriter &w) const {
  const unsigned width = bits_for(q_);
  for (std::uint64_t x : z_)
    w.write(x, width);
}

void SyndromeSketch::read_body(BitReader &r) {
  const unsigned width = bits_for(q_);
  for (auto &x : z_) {
    x = r.read(width);
    if (x >= q_)
      throw Error(ErrorCode::CorruptData, "syndrome element outside field");
  }
}

std::vector<std::uint8_t> SyndromeSketch::serialize() const {
  BitWriter w;
  write_header(w, ArtifactKind::SyndromeSketch);
  w.write_u64(u_);
  w.write(k_, 32);
  w.write_u64(q_);
  write_body(w);
  return w.bytes();
}

SyndromeSketch SyndromeSketch::deserialize(std::span<const std::uint8_t> bytes) {
  BitReader r(bytes);
  read_header(r, ArtifactKind::SyndromeSketch);
  const std::uint64_t u = r.read_u64();
  const auto k = static_cast<std::uint32_t>(r.read(32));
  const std::uint64_t q = r.read_u64();
  if (q < u || q < 2 || k > (1U << 20))
    throw Error(ErrorCode::CorruptData, "bad syndrome parameters");
  SyndromeSketch s(u, k, q);
  s.read_body(r);
  return s;
}

} // namespace ftdo
