#include "doctest.h"

#include <algorithm>
#include <random>
#include <set>

#include "ftdo/bits.hpp"
#include "ftdo/error.hpp"
#include "ftdo/field.hpp"
#include "ftdo/hashing.hpp"
#include "ftdo/l0_sampler.hpp"
#include "ftdo/sparse_recovery.hpp"
#include "ftdo/syndrome.hpp"

using namespace ftdo;

namespace {

bool trial_division_prime(std::uint64_t x) {
  if (x < 2)
    return false;
  for (std::uint64_t d = 2; d * d <= x; ++d)
    if (x % d == 0)
      return false;
  return true;
}

/// Power sums sum_{e in S} e^j mod q for j = 1..2k, with the count in row 0.
std::vector<std::uint64_t> reference_syndrome(std::uint32_t k, std::uint64_t q, const std::vector<std::uint64_t> &s) {
  std::vector<std::uint64_t> z(2 * k + 1, 0);
  for (auto e : s) {
    unsigned __int128 p = 1;
    for (std::uint32_t j = 0; j <= 2 * k; ++j) {
      z[j] = static_cast<std::uint64_t>((z[j] + p) % q);
      p = p * e % q;
    }
  }
  return z;
}

} // namespace

TEST_CASE("choose_prime picks the smallest prime at least u") {
  CHECK(choose_prime(10) == 11);
  CHECK(choose_prime(2) == 2);
  CHECK(choose_prime(6) == 7);
  for (std::uint64_t u = 2; u < 3000; ++u) {
    const std::uint64_t p = choose_prime(u);
    REQUIRE(trial_division_prime(p));
    REQUIRE(p >= u);
    REQUIRE(p <= 2 * u);
    for (std::uint64_t x = u; x < p; ++x)
      REQUIRE(!trial_division_prime(x));
  }
  CHECK_THROWS_AS(choose_prime(1), Error);
}

TEST_CASE("modular helpers") {
  const std::uint64_t q = 1000000007;
  CHECK(mul_mod(inv_mod(12345, q), 12345, q) == 1);
  CHECK(pow_mod(3, 4, 11) == 4);
  CHECK(add_mod(q - 1, 5, q) == 4);
  CHECK(sub_mod(2, 5, q) == q - 3);
}

TEST_CASE("syndrome updates are linear") {
  SyndromeSketch s(10, 2);
  CHECK(s.modulus() == 11);
  s.update(3, +1);
  CHECK(std::vector<std::uint64_t>(s.syndrome().begin(), s.syndrome().end()) == reference_syndrome(2, 11, {3}));
  s.update(3, -1);
  CHECK(s.is_zero());

  SyndromeSketch a(10, 2), b(10, 2);
  a.update(2, +1);
  a.update(5, +1);
  b.update(5, +1);
  b.update(2, +1);
  CHECK(a == b);
  CHECK(encode_syndrome(10, 2, 11, std::vector<std::uint64_t>{2, 5}) == reference_syndrome(2, 11, {2, 5}));
  CHECK_THROWS_AS(a.update(10, +1), Error);

  SyndromeSketch c(10, 2);
  c.update(7, +1);
  c.merge(a);
  SyndromeSketch d(10, 2);
  for (auto e : {2, 5, 7})
    d.update(e, +1);
  CHECK(c == d);
}

TEST_CASE("syndrome decode examples") {
  SyndromeSketch s(10, 2);
  CHECK(s.decode() == std::vector<std::uint64_t>{});
  s.update(2, +1);
  s.update(5, +1);
  CHECK(s.decode() == std::vector<std::uint64_t>{2, 5});
  s.update(1, +1);
  CHECK(!s.decode().has_value());
  SyndromeSketch three(10, 2);
  for (auto e : {1, 2, 3})
    three.update(e, +1);
  CHECK(!three.decode().has_value());
  SyndromeSketch zero(10, 1);
  zero.update(0, +1);
  CHECK(zero.decode() == std::vector<std::uint64_t>{0});
}

TEST_CASE("syndromes of distinct small sets differ") {
  for (std::uint64_t u = 2; u <= 50; ++u)
    for (std::uint32_t k = 1; k <= 2; ++k) {
      const std::uint64_t q = choose_prime(u);
      std::vector<std::vector<std::uint64_t>> sets = {{}};
      for (std::uint64_t x = 0; x < u; ++x) {
        sets.push_back({x});
        if (k == 2)
          for (std::uint64_t y = x + 1; y < u; ++y)
            sets.push_back({x, y});
      }
      std::set<std::vector<std::uint64_t>> seen;
      for (const auto &set : sets) {
        const auto z = reference_syndrome(k, q, set);
        REQUIRE(encode_syndrome(u, k, q, set) == z);
        seen.insert(z);
      }
      REQUIRE(seen.size() == sets.size());
    }
}

TEST_CASE("syndrome random roundtrips and deletion soundness") {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 2000; ++i) {
    const std::uint64_t u = 2 + rng() % 10000;
    const auto k = static_cast<std::uint32_t>(1 + rng() % 8);
    const std::size_t size = rng() % (std::min<std::uint64_t>(k, u) + 1);
    std::set<std::uint64_t> s;
    while (s.size() < size)
      s.insert(rng() % u);
    SyndromeSketch sk(u, k);
    for (auto e : s)
      sk.update(e, +1);
    REQUIRE(sk.decode() == std::vector<std::uint64_t>(s.begin(), s.end()));
    std::vector<std::uint64_t> candidates(s.begin(), s.end());
    candidates.push_back(rng() % u);
    std::sort(candidates.begin(), candidates.end());
    REQUIRE(sk.decode(candidates) == std::vector<std::uint64_t>(s.begin(), s.end()));
  }
  for (int i = 0; i < 500; ++i) {
    const std::uint64_t u = 100 + rng() % 1000;
    const auto k = static_cast<std::uint32_t>(1 + rng() % 4);
    std::set<std::uint64_t> all;
    while (all.size() < k + 10)
      all.insert(rng() % u);
    std::vector<std::uint64_t> v(all.begin(), all.end());
    std::shuffle(v.begin(), v.end(), rng);
    SyndromeSketch sk(u, k);
    for (auto e : v)
      sk.update(e, +1);
    const std::size_t keep = rng() % (k + 1);
    for (std::size_t j = keep; j < v.size(); ++j)
      sk.update(v[j], -1);
    std::vector<std::uint64_t> expect(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(keep));
    std::sort(expect.begin(), expect.end());
    REQUIRE(sk.decode() == expect);
  }
}

TEST_CASE("a full prime universe wraps the count and still decodes") {
  SyndromeSketch s(3, 3);
  for (auto e : {0, 1, 2})
    s.update(e, +1);
  CHECK(s.decode() == std::vector<std::uint64_t>{0, 1, 2});
}

TEST_CASE("syndrome layout size") {
  for (std::uint32_t k : {0u, 1u, 3u, 7u})
    for (std::uint64_t u : {10ULL, 1000ULL, 123457ULL}) {
      const SyndromeSketch s(u, k);
      const std::uint64_t q = choose_prime(u);
      unsigned width = 0;
      while ((std::uint64_t{1} << width) < q)
        ++width;
      CHECK(s.body_bits() == (2ULL * k + 1) * width);
      const auto bytes = s.serialize();
      const std::uint64_t fixed = kHeaderBits + 64 + 32 + 64;
      CHECK(bytes.size() * 8 >= fixed + s.body_bits());
      CHECK(bytes.size() * 8 < fixed + s.body_bits() + 8);
      CHECK(SyndromeSketch::deserialize(bytes) == s);
    }
}

TEST_CASE("bit packing roundtrip") {
  BitWriter w;
  w.write(5, 3);
  w.write(0, 1);
  w.write_u64(0xDEADBEEFCAFEBABEULL);
  w.write(1, 1);
  CHECK(w.bit_length() == 69);
  BitReader r(w.bytes());
  CHECK(r.read(3) == 5);
  CHECK(r.read(1) == 0);
  CHECK(r.read_u64() == 0xDEADBEEFCAFEBABEULL);
  CHECK(r.read(1) == 1);
  CHECK_THROWS_AS(r.read(64), Error);
  CHECK(bits_for(1) == 1);
  CHECK(bits_for(2) == 1);
  CHECK(bits_for(11) == 4);
  CHECK(bits_for(16) == 4);
  CHECK(bits_for(17) == 5);
}

TEST_CASE("headers reject foreign data") {
  BitWriter w;
  write_header(w, ArtifactKind::ExpanderOracle);
  BitReader ok(w.bytes());
  CHECK_NOTHROW(read_header(ok, ArtifactKind::ExpanderOracle));
  BitReader wrong(w.bytes());
  CHECK_THROWS_AS(read_header(wrong, ArtifactKind::StarOracle), Error);
  const std::vector<std::uint8_t> junk = {1, 2, 3, 4, 5, 6, 7, 8};
  CHECK_THROWS_AS(SyndromeSketch::deserialize(junk), Error);
}

TEST_CASE("l0 sketch linearity and determinism") {
  L0Sketch fresh(500, 0.01, 7);
  L0Sketch s(500, 0.01, 7);
  s.update(42, +1);
  s.update(42, -1);
  CHECK(s == fresh);
  CHECK(s.is_zero());

  L0Sketch a(500, 0.01, 7), b(500, 0.01, 7);
  for (auto e : {3, 99, 250})
    a.update(e, +1);
  for (auto e : {250, 3, 99})
    b.update(e, +1);
  CHECK(a == b);
  CHECK(L0Sketch::deserialize(a.serialize()) == a);

  L0Sketch c(500, 0.01, 7);
  c.update(99, +1);
  L0Sketch d(500, 0.01, 7);
  for (auto e : {3, 250})
    d.update(e, +1);
  c.merge(d);
  CHECK(c == a);
  CHECK_THROWS_AS(a.update(500, +1), Error);
}

TEST_CASE("l0 samples") {
  const L0Sketch empty(100, 0.01, 1);
  CHECK(empty.sample().kind != L0Sample::Kind::Element);
  std::size_t hits = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    L0Sketch s(100, 0.01, seed);
    s.update(7, +1);
    const auto r = s.sample();
    if (r.kind == L0Sample::Kind::Element) {
      CHECK(r.element == 7);
      ++hits;
    }
  }
  CHECK(hits >= 190);

  std::mt19937_64 rng(5);
  for (int i = 0; i < 3000; ++i) {
    std::set<std::uint64_t> support;
    const std::size_t size = 1 + rng() % 60;
    while (support.size() < size)
      support.insert(rng() % 2000);
    L0Sketch s(2000, 0.05, derive_seed(3, {static_cast<std::uint64_t>(i)}));
    for (auto e : support)
      s.update(e, +1);
    const auto r = s.sample();
    if (r.kind == L0Sample::Kind::Element)
      REQUIRE(support.count(r.element) == 1);
  }
}

TEST_CASE("one-sparse tester") {
  const std::uint64_t r = 123456789;
  OneSparse t;
  t.update(17, +1, mersenne_pow(r, 17));
  CHECK(t.recover(100, r) == 17);
  t.update(23, +1, mersenne_pow(r, 23));
  CHECK(!t.recover(100, r).has_value());
  t.update(17, -1, mersenne_pow(r, 17));
  CHECK(t.recover(100, r) == 23);
  CHECK(mersenne_mul(kMersenne61 - 1, kMersenne61 - 1) == 1);
}

TEST_CASE("sparse recovery decodes sparse vectors and never invents elements") {
  std::mt19937_64 rng(8);
  std::size_t complete = 0, eligible = 0;
  for (int i = 0; i < 500; ++i) {
    const std::size_t s = 1 + rng() % 8;
    SparseRecovery rec(5000, s, derive_seed(11, {static_cast<std::uint64_t>(i)}));
    std::set<std::uint64_t> support;
    const std::size_t size = rng() % (2 * s + 1);
    while (support.size() < size)
      support.insert(rng() % 5000);
    for (auto e : support)
      rec.update(e, +1);
    const auto out = rec.recover();
    for (auto e : out.elements)
      REQUIRE(support.count(e) == 1);
    if (support.size() <= s) {
      ++eligible;
      complete += out.complete;
      if (out.complete)
        CHECK(out.elements == std::vector<std::uint64_t>(support.begin(), support.end()));
    }
  }
  CHECK(complete * 10 >= eligible * 9);
}

TEST_CASE("seed derivation is stable and path sensitive") {
  CHECK(derive_seed(1, {2, 3}) == derive_seed(1, {2, 3}));
  CHECK(derive_seed(1, {2, 3}) != derive_seed(1, {3, 2}));
  CHECK(derive_seed(1, {2}) != derive_seed(2, {2}));
  CHECK(splitmix64(0) == 0xE220A8397B1DCDAFULL);
}
