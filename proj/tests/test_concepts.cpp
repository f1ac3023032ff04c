#include "qksvm/concepts.hpp"

#include <stdexcept>

#include "doctest.h"
#include "test_helpers.hpp"

using namespace qksvm;
namespace helpers = qksvm::testing;

namespace {

// Oracle label: +1 iff the log (from the brute-force table) lies in the
// half-length interval starting at s, computed by set membership.
int oracle_label(std::uint64_t x, std::uint64_t s, std::uint64_t p,
                 std::uint64_t g) {
  const auto logs = helpers::log_table(g, p);
  const auto half = helpers::interval_set(s, (p - 1) / 2, p - 1);
  return half.count(logs.at(x)) ? +1 : -1;
}

}  // namespace

TEST_CASE("label examples at p=23") {
  const GroupParams params = make_group(23, 5);
  const Concept target = make_concept(1, params);
  CHECK(label(5, target) == +1);    // log 5 = 1 in [1, 11]
  CHECK(label(18, target) == -1);   // log 18 = 12 outside
  CHECK(oracle_label(5, 1, 23, 5) == +1);
  CHECK(oracle_label(18, 1, 23, 5) == -1);
  // The interval start g^s is always +1.
  for (std::uint64_t s = 0; s < params.order; ++s) {
    const Concept c = make_concept(s, params);
    CHECK(label(mod_pow(params.g, s, params), c) == +1);
  }
  CHECK_THROWS_AS(label(0, target), std::domain_error);
  CHECK_THROWS_AS(label(23, target), std::domain_error);
  CHECK_THROWS_AS(make_concept(22, params), std::domain_error);
}

TEST_CASE("label agrees with the set-membership oracle exhaustively") {
  const GroupParams params = make_group(23, 5);
  for (const std::uint64_t s : {0ull, 1ull, 7ull, 21ull}) {
    const Concept target = make_concept(s, params);
    for (std::uint64_t x = 1; x < params.p; ++x)
      CHECK(label(x, target) == oracle_label(x, s, 23, 5));
  }
}

TEST_CASE("class balance: every concept labels exactly half +1") {
  const GroupParams params = make_group(23, 5);
  for (std::uint64_t s = 0; s < params.order; ++s) {
    const Concept target = make_concept(s, params);
    std::int64_t sum = 0;
    for (std::uint64_t e = 0; e < params.order; ++e)
      sum += label_from_exponent(e, target);
    CHECK(sum == 0);
  }
}

TEST_CASE("exhaustive exponent sweep labels 11 of 22 as +1") {
  const GroupParams params = make_group(23, 5);
  const Concept target = make_concept(1, params);
  std::uint64_t plus = 0;
  for (std::uint64_t e = 0; e < params.order; ++e)
    if (label_from_exponent(e, target) == +1) ++plus;
  CHECK(plus == 11);
}

TEST_CASE("shift covariance reduces any concept to key 1") {
  const GroupParams params = make_group(23, 5);
  const Concept base = make_concept(1, params);
  for (const std::uint64_t s : {1ull, 5ull, 13ull, 21ull}) {
    const Concept target = make_concept(s, params);
    const std::uint64_t shift = mod_pow(params.g, s - 1, params);
    for (std::uint64_t x = 1; x < params.p; ++x)
      CHECK(label(mul_mod(x, shift, params.p), target) == label(x, base));
  }
}

TEST_CASE("generate_sample is consistent and deterministic") {
  const GroupParams params = make_group(23, 5);
  const Concept target = make_concept(4, params);
  Rng rng(42);
  for (int i = 0; i < 200; ++i) {
    const LabeledSample s = generate_sample(target, rng);
    CHECK(s.x >= 1);
    CHECK(s.x < params.p);
    CHECK(s.y == label(s.x, target));  // via the discrete-log oracle
  }
  Rng rng_a(7);
  Rng rng_b(7);
  for (int i = 0; i < 50; ++i) {
    const LabeledSample a = generate_sample(target, rng_a);
    const LabeledSample b = generate_sample(target, rng_b);
    CHECK(a.x == b.x);
    CHECK(a.y == b.y);
  }
}

TEST_CASE("generate_sample marginal is uniform (chi-square)") {
  const GroupParams params = make_group(23, 5);
  const Concept target = make_concept(4, params);
  Rng rng(1);
  const std::size_t draws = 22000;
  std::vector<std::size_t> counts(params.p, 0);
  for (std::size_t i = 0; i < draws; ++i) ++counts[generate_sample(target, rng).x];
  const double expected = static_cast<double>(draws) / 22.0;
  double chi_sq = 0.0;
  for (std::uint64_t x = 1; x < params.p; ++x) {
    const double d = static_cast<double>(counts[x]) - expected;
    chi_sq += d * d / expected;
  }
  // df = 21; 60 sits far beyond the 0.9999 quantile (~52.6).
  CHECK(chi_sq < 60.0);
}

TEST_CASE("generate_dataset contract") {
  const GroupParams params = make_group(23, 5);
  const Concept target = make_concept(4, params);
  Rng rng(9);
  CHECK_THROWS_AS(generate_dataset(target, 0, rng), std::domain_error);
  const auto small = generate_dataset(target, 3, rng);
  CHECK(small.size() == 3);
  for (const auto& s : small) CHECK(s.y == label(s.x, target));

  Rng rng_big(11);
  const auto big = generate_dataset(target, 1000, rng_big);
  std::size_t plus = 0;
  for (const auto& s : big) plus += s.y == +1;
  const double fraction = static_cast<double>(plus) / 1000.0;
  CHECK(fraction >= 0.45);
  CHECK(fraction <= 0.55);

  Rng rng_c(11);
  const auto again = generate_dataset(target, 1000, rng_c);
  for (std::size_t i = 0; i < big.size(); ++i) {
    CHECK(big[i].x == again[i].x);
    CHECK(big[i].y == again[i].y);
  }
}

TEST_CASE("exact_accuracy on reference classifiers") {
  const GroupParams params = make_group(23, 5);
  const Concept target = make_concept(6, params);
  CHECK(exact_accuracy([&](std::uint64_t x) { return label(x, target); },
                       target) == 1.0);
  CHECK(exact_accuracy([](std::uint64_t) { return +1; }, target) == 0.5);
  CHECK(exact_accuracy([&](std::uint64_t x) { return -label(x, target); },
                       target) == 0.0);
}

TEST_CASE("exact_accuracy guard and sampled_accuracy fallback") {
  const GroupParams params = random_group(26, 1);
  const Concept target = make_concept(5, params);
  CHECK_THROWS_AS(
      exact_accuracy([](std::uint64_t) { return +1; }, target),
      std::domain_error);
  const double acc =
      sampled_accuracy([](std::uint64_t) { return +1; }, target, 2000, 3);
  CHECK(acc > 0.4);
  CHECK(acc < 0.6);
  CHECK(sampled_accuracy([](std::uint64_t) { return +1; }, target, 2000, 3) ==
        acc);  // deterministic
}
