#include "ftdo/field.hpp"

#include "ftdo/error.hpp"

namespace ftdo {

bool is_prime(std::uint64_t x) {
  if (x < 2)
    return false;
  if (x % 2 == 0)
    return x == 2;
  for (std::uint64_t d = 3; d * d <= x; d += 2)
    if (x % d == 0)
      return false;
  return true;
}

std::uint64_t choose_prime(std::uint64_t u) {
  if (u < 2)
    throw Error(ErrorCode::OutOfRange, "choose_prime needs u >= 2");
  std::uint64_t p = u;
  while (!is_prime(p))
    ++p;
  return p;
}

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t q) {
  std::uint64_t result = 1 % q;
  base %= q;
  while (exp > 0) {
    if (exp & 1U)
      result = mul_mod(result, base, q);
    base = mul_mod(base, base, q);
    exp >>= 1;
  }
  return result;
}

std::uint64_t inv_mod(std::uint64_t a, std::uint64_t q) {
  if (a % q == 0)
    throw Error(ErrorCode::DecodeFailure, "inverse of zero");
  return pow_mod(a, q - 2, q);
}

} // namespace ftdo
