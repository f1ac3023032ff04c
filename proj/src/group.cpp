#include "qksvm/group.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "qksvm/rng.hpp"

namespace qksvm {

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(a) * b) % m);
}

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
  std::uint64_t result = 1 % m;
  base %= m;
  while (exp > 0) {
    if (exp & 1) result = mul_mod(result, base, m);
    base = mul_mod(base, base, m);
    exp >>= 1;
  }
  return result;
}

std::uint64_t mod_pow(std::uint64_t base, std::uint64_t exp,
                      const GroupParams& params) {
  if (base < 1 || base > params.p - 1)
    throw std::domain_error("mod_pow: base outside [1, p-1]");
  return pow_mod(base, exp, params.p);
}

namespace {

constexpr std::uint64_t kWitnesses[] = {2,  3,  5,  7,  11, 13,
                                        17, 19, 23, 29, 31, 37};

// Returns true when a witnesses the compositeness of n.
bool miller_rabin_witness(std::uint64_t a, std::uint64_t d, unsigned r,
                          std::uint64_t n) {
  std::uint64_t x = pow_mod(a, d, n);
  if (x == 1 || x == n - 1) return false;
  for (unsigned i = 1; i < r; ++i) {
    x = mul_mod(x, x, n);
    if (x == n - 1) return false;
  }
  return true;
}

}  // namespace

bool is_prime(std::uint64_t x) {
  if (x < 2) return false;
  for (std::uint64_t q : kWitnesses) {
    if (x == q) return true;
    if (x % q == 0) return false;
  }
  std::uint64_t d = x - 1;
  unsigned r = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++r;
  }
  // This witness set is deterministic below 2^64.
  for (std::uint64_t a : kWitnesses) {
    if (miller_rabin_witness(a, d, r, x)) return false;
  }
  return true;
}

std::vector<std::uint64_t> distinct_prime_factors(std::uint64_t x) {
  std::vector<std::uint64_t> factors;
  for (std::uint64_t q = 2; q * q <= x; q += (q == 2 ? 1 : 2)) {
    if (x % q == 0) {
      factors.push_back(q);
      do {
        x /= q;
      } while (x % q == 0);
    }
  }
  if (x > 1) factors.push_back(x);
  return factors;
}

bool is_generator(std::uint64_t g, std::uint64_t p,
                  const std::vector<std::uint64_t>& order_factors) {
  if (!is_prime(p)) throw std::domain_error("is_generator: p is not prime");
  if (g < 2 || g > p - 1) return false;
  for (std::uint64_t q : order_factors) {
    if (pow_mod(g, (p - 1) / q, p) == 1) return false;
  }
  return true;
}

bool is_generator(std::uint64_t g, std::uint64_t p) {
  if (!is_prime(p)) throw std::domain_error("is_generator: p is not prime");
  return is_generator(g, p, distinct_prime_factors(p - 1));
}

GroupParams make_group(std::uint64_t p, std::uint64_t g) {
  if (p < 5 || !is_prime(p)) throw std::domain_error("make_group: p must be an odd prime >= 5");
  if (p >> kMaxGroupBits) throw std::domain_error("make_group: p above the supported word limit");
  if (!is_generator(g, p)) throw std::domain_error("make_group: g does not generate Z_p^*");
  GroupParams params;
  params.p = p;
  params.g = g;
  params.n = static_cast<unsigned>(std::bit_width(p));
  params.order = p - 1;
  return params;
}

GroupParams random_group(unsigned bits, std::uint64_t seed) {
  if (bits < 3 || bits > kMaxGroupBits)
    throw std::domain_error("random_group: bits outside [3, 44]");
  Rng rng(stream_seed({0x67726F7570ull, seed}));
  const std::uint64_t lo = std::uint64_t{1} << (bits - 1);
  for (;;) {
    const std::uint64_t candidate = lo | rng.next_below(lo) | 1ull;
    if (!is_prime(candidate)) continue;
    const auto factors = distinct_prime_factors(candidate - 1);
    // Generators have density phi(p-1)/(p-1); a few draws suffice.
    for (int attempt = 0; attempt < 256; ++attempt) {
      const std::uint64_t g = 2 + rng.next_below(candidate - 3);
      if (is_generator(g, candidate, factors)) {
        GroupParams params;
        params.p = candidate;
        params.g = g;
        params.n = static_cast<unsigned>(std::bit_width(candidate));
        params.order = candidate - 1;
        return params;
      }
    }
  }
}

std::uint64_t discrete_log(std::uint64_t y, const GroupParams& params) {
  if (y < 1 || y > params.p - 1)
    throw std::domain_error("discrete_log: y outside [1, p-1]");
  const std::uint64_t p = params.p;
  const std::uint64_t order = params.order;
  const auto step = static_cast<std::uint64_t>(
      std::ceil(std::sqrt(static_cast<double>(order))));
  std::unordered_map<std::uint64_t, std::uint64_t> baby;
  baby.reserve(static_cast<std::size_t>(step) * 2);
  std::uint64_t cur = 1;
  for (std::uint64_t j = 0; j < step; ++j) {
    baby.emplace(cur, j);
    cur = mul_mod(cur, params.g, p);
  }
  const std::uint64_t giant = pow_mod(params.g, order - (step % order), p);
  std::uint64_t gamma = y;
  for (std::uint64_t i = 0; i * step <= order; ++i) {
    const auto it = baby.find(gamma);
    if (it != baby.end()) return (i * step + it->second) % order;
    gamma = mul_mod(gamma, giant, p);
  }
  throw std::domain_error("discrete_log: no exponent found (invalid generator?)");
}

std::uint64_t cyclic_distance(std::uint64_t a, std::uint64_t b,
                              std::uint64_t order) {
  const std::uint64_t d = a >= b ? a - b : b - a;
  return d <= order - d ? d : order - d;
}

}  // namespace qksvm
