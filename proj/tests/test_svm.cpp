#include "qksvm/svm.hpp"

#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "test_helpers.hpp"

using namespace qksvm;

namespace {

KernelMatrix transformed_matrix(std::vector<double> entries, std::size_t m) {
  KernelMatrix k;
  k.m = m;
  k.transformed = true;
  k.entries = std::move(entries);
  return k;
}

// Seeded instance on a real group, exact kernel.
struct Instance {
  std::vector<std::uint64_t> xs;
  std::vector<int> ys;
  KernelMatrix kernel;
};

Instance make_instance(std::size_t m, std::uint64_t seed) {
  const GroupParams params = make_group(1019, 2);
  const FeatureConfig config = make_feature_config(5, params);
  const Concept target = make_concept(100, params);
  Rng rng(seed);
  Instance inst;
  for (std::size_t i = 0; i < m; ++i) {
    const LabeledSample s = generate_sample(target, rng);
    inst.xs.push_back(s.x);
    inst.ys.push_back(s.y);
  }
  inst.kernel =
      transform_bias(build_kernel_matrix(inst.xs, config, NoisePolicy::exact()));
  return inst;
}

}  // namespace

TEST_CASE("closed-form single-point solution") {
  // Stationarity of a - 0.5 a^2 (1 + 1/lambda): 1 - a - 2a = 0 at lambda=1/2.
  const KernelMatrix k = transformed_matrix({1.0}, 1);
  const std::vector<int> y = {+1};
  const DualSolution sol = solve_dual(k, y, 0.5);
  CHECK(sol.alphas[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
  CHECK(sol.residual <= 1e-8);
}

TEST_CASE("closed-form symmetric two-point solution") {
  const KernelMatrix k = transformed_matrix({1.0, 1.0, 1.0, 1.0}, 2);
  const std::vector<int> y = {+1, -1};
  const DualSolution sol = solve_dual(k, y, 0.5);
  CHECK(sol.alphas[0] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(sol.alphas[1] == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("solver preconditions") {
  KernelMatrix raw = transformed_matrix({1.0}, 1);
  raw.transformed = false;
  const std::vector<int> y = {+1};
  CHECK_THROWS_AS(solve_dual(raw, y, 0.5), std::domain_error);
  const KernelMatrix k = transformed_matrix({1.0}, 1);
  CHECK_THROWS_AS(solve_dual(k, y, 0.0), std::domain_error);
  CHECK_THROWS_AS(solve_dual(k, y, 1.5), std::domain_error);
  const std::vector<int> bad = {2};
  CHECK_THROWS_AS(solve_dual(k, bad, 0.5), std::domain_error);
}

TEST_CASE("solver failure carries the residual") {
  const Instance inst = make_instance(30, 4);
  SolverOptions options;
  options.max_sweeps = 1;
  options.tolerance = 1e-14;
  try {
    solve_dual(inst.kernel, inst.ys, 0.5, options);
    FAIL("expected SolverFailure");
  } catch (const SolverFailure& e) {
    CHECK(e.residual() > 1e-14);
    CHECK(e.sweeps() == 1);
  }
}

TEST_CASE("kkt_residual on reference points") {
  const KernelMatrix k = transformed_matrix({1.0}, 1);
  const std::vector<int> y = {+1};
  const std::vector<double> at_zero = {0.0};
  CHECK(kkt_residual(at_zero, k, y, 0.5) == doctest::Approx(1.0).epsilon(1e-15));
  const std::vector<double> optimal = {1.0 / 3.0};
  CHECK(kkt_residual(optimal, k, y, 0.5) <= 1e-12);
  const std::vector<double> doubled = {2.0 / 3.0};
  CHECK(kkt_residual(doubled, k, y, 0.5) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("perturbing the optimum decreases the objective") {
  const Instance inst = make_instance(25, 9);
  const DualSolution sol = solve_dual(inst.kernel, inst.ys, 0.5);
  const double best = dual_objective(sol.alphas, inst.kernel, inst.ys, 0.5);
  for (std::size_t i = 0; i < sol.alphas.size(); ++i) {
    std::vector<double> bumped = sol.alphas;
    bumped[i] += 1e-3;
    CHECK(dual_objective(bumped, inst.kernel, inst.ys, 0.5) < best);
  }
}

TEST_CASE("unique optimum: warm starts agree coordinatewise") {
  const Instance inst = make_instance(30, 11);
  const DualSolution cold = solve_dual(inst.kernel, inst.ys, 0.5);
  SolverOptions warm;
  warm.warm_start.assign(30, 0.7);
  const DualSolution from_ones = solve_dual(inst.kernel, inst.ys, 0.5, warm);
  Rng rng(3);
  SolverOptions random;
  for (int i = 0; i < 30; ++i) random.warm_start.push_back(rng.next_unit());
  const DualSolution from_random = solve_dual(inst.kernel, inst.ys, 0.5, random);
  for (std::size_t i = 0; i < cold.alphas.size(); ++i) {
    CHECK(std::fabs(cold.alphas[i] - from_ones.alphas[i]) <= 1e-6);
    CHECK(std::fabs(cold.alphas[i] - from_random.alphas[i]) <= 1e-6);
  }
}

TEST_CASE("dual objective is non-decreasing across sweeps") {
  const Instance inst = make_instance(40, 13);
  SolverOptions options;
  options.record_objective_trace = true;
  const DualSolution sol = solve_dual(inst.kernel, inst.ys, 0.5, options);
  REQUIRE(sol.objective_trace.size() >= 2);
  for (std::size_t i = 1; i < sol.objective_trace.size(); ++i)
    CHECK(sol.objective_trace[i] >= sol.objective_trace[i - 1] - 1e-12);
}

TEST_CASE("duality consistency at the optimum") {
  // At the optimum 1'a - 0.5 a'(Q+I/lambda)a equals 0.5 a'(Q+I/lambda)a,
  // i.e. the primal loss computed from a matches the dual value.
  for (const std::uint64_t seed : {1ull, 2ull, 3ull}) {
    const Instance inst = make_instance(35, seed);
    const DualSolution sol = solve_dual(inst.kernel, inst.ys, 0.5);
    const std::size_t m = inst.ys.size();
    double quad = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < m; ++j)
        row += inst.ys[i] * inst.ys[j] * inst.kernel.at(i, j) * sol.alphas[j];
      quad += sol.alphas[i] * (row + sol.alphas[i] / 0.5);
    }
    CHECK(sol.objective == doctest::Approx(0.5 * quad).epsilon(1e-6));
  }
}

TEST_CASE("slacks_from_alphas") {
  const std::vector<double> alphas = {1.0 / 3.0, 0.0};
  const std::vector<double> xi = slacks_from_alphas(alphas, 0.5);
  CHECK(xi[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(xi[1] == 0.0);
}

TEST_CASE("primal feasibility cross-check on training points") {
  const GroupParams params = make_group(1019, 2);
  const FeatureConfig config = make_feature_config(5, params);
  const Concept target = make_concept(100, params);
  Rng rng(21);
  const auto train = generate_dataset(target, 40, rng);
  const SvmModel model =
      train_svm(train, config, NoisePolicy::exact(), 0.5);
  const std::vector<double> xi = slacks_from_alphas(model.alphas, model.lambda);
  for (std::size_t i = 0; i < train.size(); ++i) {
    const double h = decision_value(train[i].x, model);
    CHECK(1.0 - train[i].y * h <= xi[i] + 1e-6);
  }
}

TEST_CASE("decision_value on a single-point model") {
  const GroupParams params = make_group(23, 5);
  const FeatureConfig config = make_feature_config(2, params);
  SvmModel model;
  model.alphas = {1.0 / 3.0};
  model.lambda = 0.5;
  model.train_x = {5};
  model.train_y = {+1};
  model.config = config;
  model.policy = NoisePolicy::exact();
  refresh_model_cache(model);
  CHECK(decision_value(5, model) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  model.alphas = {0.0};
  for (std::uint64_t x = 1; x < 23; ++x) {
    CHECK(decision_value(x, model) == 0.0);
    CHECK(predict(x, model) == +1);  // sign(0) -> +1
  }
}

TEST_CASE("label negation flips every prediction") {
  const GroupParams params = make_group(1019, 2);
  const FeatureConfig config = make_feature_config(5, params);
  const Concept target = make_concept(321, params);
  Rng rng(8);
  auto train = generate_dataset(target, 30, rng);
  const SvmModel model = train_svm(train, config, NoisePolicy::exact(), 0.5);
  auto flipped = train;
  for (auto& s : flipped) s.y = -s.y;
  const SvmModel negated = train_svm(flipped, config, NoisePolicy::exact(), 0.5);
  for (std::uint64_t x = 1; x <= 200; ++x) {
    const double h = decision_value(x, model);
    if (h == 0.0) continue;
    CHECK(predict(x, negated) == -predict(x, model));
  }
}

TEST_CASE("prediction path equals explicit kernel-row assembly") {
  const GroupParams params = make_group(1019, 2);
  const FeatureConfig config = make_feature_config(5, params);
  const Concept target = make_concept(500, params);
  Rng rng(31);
  const auto train = generate_dataset(target, 25, rng);
  const SvmModel model = train_svm(train, config, NoisePolicy::exact(), 0.5);
  for (std::uint64_t x = 1; x <= 100; ++x) {
    double h = 0.0;
    for (std::size_t i = 0; i < train.size(); ++i)
      h += model.alphas[i] * train[i].y * 0.5 *
           (kernel_exact(x, train[i].x, config) + 1.0);
    CHECK(decision_value(x, model) == doctest::Approx(h).epsilon(1e-12));
  }
}
