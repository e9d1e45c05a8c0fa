#pragma once

#include <cstdint>

namespace ftdo {

bool is_prime(std::uint64_t x);

/// Smallest prime >= u (u >= 2); lies in [u, 2u] by Bertrand's postulate.
std::uint64_t choose_prime(std::uint64_t u);

inline std::uint64_t add_mod(std::uint64_t a, std::uint64_t b, std::uint64_t q) {
  const std::uint64_t s = a + b;
  return (s >= q || s < a) ? s - q : s;
}

inline std::uint64_t sub_mod(std::uint64_t a, std::uint64_t b, std::uint64_t q) {
  return a >= b ? a - b : a + (q - b);
}

inline std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t q) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % q);
}

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t q);
/// Inverse modulo prime q via Fermat; a must be nonzero mod q.
std::uint64_t inv_mod(std::uint64_t a, std::uint64_t q);

} // namespace ftdo
