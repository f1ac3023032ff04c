#pragma once

#include <cstdint>
#include <vector>

namespace qksvm {

// Multiplicative group Z_p^* with a fixed generator. Exponents (discrete
// logs) are residues in [0, p-2] with log(1) = 0.
struct GroupParams {
  std::uint64_t p = 0;      // prime modulus
  std::uint64_t g = 0;      // generator of Z_p^*
  unsigned n = 0;           // bit length, ceil(log2 p)
  std::uint64_t order = 0;  // p - 1
};

// Largest supported modulus bit length. Arithmetic uses 128-bit
// intermediates; the baby-step-giant-step table is the practical limiter.
inline constexpr unsigned kMaxGroupBits = 44;

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m);
std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t m);

// base^exp mod p with base validated to lie in [1, p-1].
std::uint64_t mod_pow(std::uint64_t base, std::uint64_t exp, const GroupParams& params);

// Deterministic Miller-Rabin, valid for all 64-bit inputs.
bool is_prime(std::uint64_t x);

// Distinct prime factors by trial division.
std::vector<std::uint64_t> distinct_prime_factors(std::uint64_t x);

// True iff g generates Z_p^*: g^((p-1)/q) != 1 for every prime q | p-1.
bool is_generator(std::uint64_t g, std::uint64_t p);
bool is_generator(std::uint64_t g, std::uint64_t p,
                  const std::vector<std::uint64_t>& order_factors);

// Validates (p, g) and fills the derived fields.
GroupParams make_group(std::uint64_t p, std::uint64_t g);

// Random prime of exactly `bits` bits with a verified generator.
// Deterministic given the seed.
GroupParams random_group(unsigned bits, std::uint64_t seed);

// Baby-step-giant-step: the e in [0, p-2] with g^e = y (mod p).
// O(sqrt p) time and memory; builds a private table per call.
std::uint64_t discrete_log(std::uint64_t y, const GroupParams& params);

// min(|a-b|, order-|a-b|) on the exponent circle.
std::uint64_t cyclic_distance(std::uint64_t a, std::uint64_t b, std::uint64_t order);

}  // namespace qksvm
