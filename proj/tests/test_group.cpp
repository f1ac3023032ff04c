#include "qksvm/group.hpp"

#include <set>
#include <stdexcept>

#include "doctest.h"
#include "test_helpers.hpp"

using namespace qksvm;
namespace helpers = qksvm::testing;

TEST_CASE("mod_pow matches the brute-force power table") {
  const GroupParams params = make_group(23, 5);
  const auto powers = helpers::power_table(5, 23);
  CHECK(mod_pow(params.g, 0, params) == 1);
  CHECK(mod_pow(params.g, params.p - 1, params) == 1);  // Fermat
  CHECK(powers[13] == 21);
  CHECK(mod_pow(5, 13, params) == 21);
  for (std::uint64_t e = 0; e < params.order; ++e)
    CHECK(mod_pow(params.g, e, params) == powers[e]);
}

TEST_CASE("mod_pow rejects bases outside [1, p-1]") {
  const GroupParams params = make_group(23, 5);
  CHECK_THROWS_AS(mod_pow(0, 3, params), std::domain_error);
  CHECK_THROWS_AS(mod_pow(23, 3, params), std::domain_error);
}

TEST_CASE("is_prime on known primes and composites") {
  CHECK(is_prime(2));
  CHECK(is_prime(23));
  CHECK(is_prime(251));
  CHECK(is_prime(1019));
  CHECK(is_prime(65521));
  CHECK(is_prime(1048573));
  CHECK(is_prime(2305843009213693951ull));  // 2^61 - 1
  CHECK_FALSE(is_prime(1));
  CHECK_FALSE(is_prime(561));    // Carmichael
  CHECK_FALSE(is_prime(65519 * 3));
  CHECK_FALSE(is_prime(1048575));
}

TEST_CASE("is_generator examples at p=23") {
  CHECK(is_generator(5, 23));
  CHECK_FALSE(is_generator(1, 23));   // identity, order 1
  CHECK(helpers::brute_force_order(2, 23) == 11);
  CHECK_FALSE(is_generator(2, 23));
  CHECK_THROWS_AS(is_generator(3, 22), std::domain_error);  // p not prime
}

TEST_CASE("is_generator agrees with brute-force order computation") {
  for (const std::uint64_t p : {23ull, 251ull, 509ull}) {
    for (std::uint64_t g = 1; g < p; ++g) {
      const bool expected = helpers::brute_force_order(g, p) == p - 1;
      CHECK(is_generator(g, p) == expected);
    }
  }
}

TEST_CASE("discrete_log examples and round trip") {
  const GroupParams params = make_group(23, 5);
  CHECK(discrete_log(1, params) == 0);
  CHECK(discrete_log(params.g, params) == 1);
  CHECK(discrete_log(21, params) == 13);  // power table: 5^13 = 21
  CHECK_THROWS_AS(discrete_log(0, params), std::domain_error);
  CHECK_THROWS_AS(discrete_log(23, params), std::domain_error);
}

TEST_CASE("discrete_log is a bijection onto [0, p-2]") {
  for (const std::uint64_t p : {23ull, 251ull, 1019ull}) {
    std::uint64_t g = 2;
    while (!is_generator(g, p)) ++g;
    const GroupParams params = make_group(p, g);
    std::set<std::uint64_t> exponents;
    for (std::uint64_t y = 1; y < p; ++y) {
      const std::uint64_t e = discrete_log(y, params);
      CHECK(e < params.order);
      CHECK(mod_pow(params.g, e, params) == y);  // round trip
      exponents.insert(e);
    }
    CHECK(exponents.size() == params.order);
  }
}

TEST_CASE("make_group validates inputs") {
  CHECK_THROWS_AS(make_group(21, 2), std::domain_error);   // composite
  CHECK_THROWS_AS(make_group(23, 2), std::domain_error);   // not a generator
  CHECK_THROWS_AS(make_group(3, 2), std::domain_error);    // too small
  const GroupParams params = make_group(1019, 2);
  CHECK(params.n == 10);
  CHECK(params.order == 1018);
}

TEST_CASE("random_group honors the contract and is deterministic") {
  const GroupParams a = random_group(5, 7);
  CHECK(a.p >= 16);
  CHECK(a.p < 32);
  CHECK(is_prime(a.p));
  CHECK(is_generator(a.g, a.p));
  CHECK(a.order == a.p - 1);
  CHECK(a.n == 5);
  const GroupParams b = random_group(5, 7);
  CHECK(a.p == b.p);
  CHECK(a.g == b.g);
  CHECK_THROWS_AS(random_group(2, 1), std::domain_error);
  CHECK_THROWS_AS(random_group(45, 1), std::domain_error);
}

TEST_CASE("random_group at working sizes") {
  for (const unsigned bits : {16u, 20u}) {
    const GroupParams params = random_group(bits, 1);
    CHECK(params.n == bits);
    CHECK(is_generator(params.g, params.p));
  }
}

TEST_CASE("cyclic_distance") {
  CHECK(cyclic_distance(3, 19, 22) == 6);
  CHECK(cyclic_distance(19, 3, 22) == 6);
  CHECK(cyclic_distance(5, 5, 22) == 0);
  CHECK(cyclic_distance(0, 11, 22) == 11);
}
