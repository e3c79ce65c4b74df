#include <string>

#include "doctest.h"
#include "slim/io.hpp"
#include "slim/solver.hpp"
#include "support.hpp"

using namespace slim;

namespace {

Dataset toy() { return Dataset({1, 2, -1, 1}, 4, 1, {1, 1, -1, -1}, {"x"}); }

SlimConfig config(const char* c0, const char* c1, InterceptPolicy policy = InterceptPolicy::unpenalized) {
  SlimConfig cfg;
  cfg.c0 = Penalty::parse(c0);
  cfg.c1 = Penalty::parse(c1);
  cfg.intercept = policy;
  cfg.time_limit = std::chrono::seconds(60);
  return cfg;
}

Dataset haberman_head(std::size_t rows) {
  const Dataset all = ingest_csv(std::string(SLIM_DATA_DIR) + "/haberman.csv", {"Died", "1", "0", {}});
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < rows && i < all.n(); ++i) idx.push_back(i);
  return all.subset(idx);
}

void check_same(const SolveReport& a, const SolveReport& b) {
  CHECK(a.incumbent == b.incumbent);
  CHECK(a.objective_value.exact() == b.objective_value.exact());
  CHECK(a.best_lower_bound.exact() == b.best_lower_bound.exact());
  CHECK(a.gap == b.gap);
  CHECK(a.nodes_expanded == b.nodes_expanded);
  CHECK(a.status == b.status);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t k = 0; k < a.trace.size(); ++k) {
    CHECK(a.trace[k].incumbent == b.trace[k].incumbent);
    CHECK(a.trace[k].lower_bound == b.trace[k].lower_bound);
    CHECK(a.trace[k].nodes == b.trace[k].nodes);
  }
}

}  // namespace

TEST_CASE("penalty above the maximum loss keeps every coefficient at zero") {
  testing::Gen g(1);
  const Dataset d = testing::random_dataset(g, 30, 3, -3, 3);
  const SolveReport r = solve(d, CoefficientLattice::integer_range(5, 3), config("1.5", "0", InterceptPolicy::none));
  CHECK(r.status == SolveStatus::optimal);
  CHECK(r.incumbent.model_size() == 0);
  CHECK(r.objective_value.exact() == Rational(1, 1));
  CHECK(r.gap == 0);
}

TEST_CASE("toy set matches exhaustive enumeration") {
  const auto lat = CoefficientLattice::integer_range(2, 1);
  for (auto policy : {InterceptPolicy::none, InterceptPolicy::unpenalized, InterceptPolicy::penalized}) {
    const SlimConfig cfg = config("0.05", "0.01", policy);
    const SolveReport r = solve(toy(), lat, cfg);
    const auto want = testing::enumerate_optimum(toy(), {{-2, -1, 0, 1, 2}}, 2, cfg.c0.nanos(), cfg.c1.nanos(), policy);
    CHECK(r.status == SolveStatus::optimal);
    CHECK(r.objective_value.exact() == want.value);
    CHECK(r.incumbent.coefficients == want.lambda);
    CHECK(r.incumbent.intercept == want.intercept);
  }
}

TEST_CASE("brute force on trivial lattices") {
  const Dataset d({1, 2, 3}, 3, 1, {1, -1, 1}, {"x"});
  const SolveReport r = brute_force(d, CoefficientLattice::uniform({0}, 1), config("0.1", "0", InterceptPolicy::none));
  CHECK(r.incumbent.coefficients == std::vector<Coefficient>{0});
  CHECK(r.objective_value.exact() == Rational(1, 1));
  CHECK(r.status == SolveStatus::optimal);

  // Separable by lambda = (1, -1).
  const Dataset sep({2, 0, 0, 2, 1, -1, -1, 1}, 4, 2, {1, -1, 1, -1}, {"a", "b"});
  const SolveReport s = brute_force(sep, CoefficientLattice::uniform({-1, 0, 1}, 2), config("0.001", "0.0001", InterceptPolicy::none));
  CHECK(s.nodes_expanded == 9);
  CHECK(misclassified(sep, s.incumbent) == 0);
  CHECK(s.incumbent.coefficients == std::vector<Coefficient>{1, -1});
}

TEST_CASE("brute force rejects instances above the cap") {
  testing::Gen g(2);
  const Dataset d = testing::random_dataset(g, 5, 4, -1, 1);
  try {
    brute_force(d, CoefficientLattice::integer_range(10, 4), config("0.01", "0"), 1000);
    FAIL("expected cap_exceeded");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::cap_exceeded);
    CHECK(std::string(e.what()).find("4084101") != std::string::npos);  // 21^4 * 21
  }
}

TEST_CASE("solve and brute force agree on random instances") {
  testing::Gen g(31337);
  for (int t = 0; t < 40; ++t) {
    const std::size_t p = static_cast<std::size_t>(g.integer(1, 3));
    const Dataset d = testing::random_dataset(g, static_cast<std::size_t>(g.integer(3, 25)), p, -2, 2);
    const auto lat = t % 2 ? CoefficientLattice::integer_range(2, p) : CoefficientLattice::uniform({-2, 0, 1, 3}, p);
    SlimConfig cfg = config("0", "0", static_cast<InterceptPolicy>(t % 3));
    cfg.c0 = testing::random_penalty(g, 100'000'000);
    cfg.c1 = testing::random_penalty(g, 10'000'000);
    const SolveReport a = solve(d, lat, cfg);
    const SolveReport b = brute_force(d, lat, cfg);
    CHECK(a.status == SolveStatus::optimal);
    CHECK(a.objective_value.exact() == b.objective_value.exact());
    CHECK(a.incumbent == b.incumbent);
  }
}

TEST_CASE("local search") {
  SUBCASE("no improving move leaves the zero model") {
    testing::Gen g(3);
    const Dataset d = testing::random_dataset(g, 20, 3, -3, 3);
    const SlimConfig cfg = config("2", "0", InterceptPolicy::none);
    const ScoringSystem m = improve_by_coordinate_moves(d, CoefficientLattice::integer_range(3, 3), cfg,
                                                        ScoringSystem::zeros(d));
    CHECK(m.model_size() == 0);
  }
  SUBCASE("separable toy improves on the zero model") {
    const Dataset sep({2, 0, 0, 2, 1, -1, -1, 1}, 4, 2, {1, -1, 1, -1}, {"a", "b"});
    const SlimConfig cfg = config("0.01", "0.001");
    const ScoringSystem m = local_search_incumbent(sep, CoefficientLattice::integer_range(3, 2), cfg, 0);
    CHECK(objective(sep, m, cfg) <= ObjectiveValue(4, 4, 0));
  }
  SUBCASE("incumbent is sandwiched between the optimum and 1") {
    testing::Gen g(4);
    for (int t = 0; t < 20; ++t) {
      const Dataset d = testing::random_dataset(g, 20, 3, -3, 3);
      const auto lat = CoefficientLattice::integer_range(3, 3);
      SlimConfig cfg = config("0.02", "0.001");
      const ScoringSystem m = local_search_incumbent(d, lat, cfg, static_cast<std::uint64_t>(t));
      CHECK_NOTHROW(check_feasible(m, lat, cfg.intercept));
      const ObjectiveValue v = objective(d, m, cfg);
      CHECK(brute_force(d, lat, cfg).objective_value <= v);
      CHECK(v <= ObjectiveValue(1, 1, 0));
    }
  }
}

TEST_CASE("reports do not depend on the thread count") {
  const Dataset d = haberman_head(120);
  const auto lat = CoefficientLattice::integer_range(20, d.p());
  SlimConfig cfg = config("0.005", "0.0001");
  cfg.threads = 1;
  const SolveReport one = solve(d, lat, cfg);
  CHECK(one.status == SolveStatus::optimal);
  for (unsigned threads : {2u, 4u, 8u}) {
    cfg.threads = threads;
    check_same(one, solve(d, lat, cfg));
  }
  cfg.node_limit = one.nodes_expanded / 3 + 1;
  cfg.threads = 1;
  const SolveReport limited = solve(d, lat, cfg);
  cfg.threads = 3;
  check_same(limited, solve(d, lat, cfg));
}

TEST_CASE("anytime behaviour") {
  const Dataset d = ingest_csv(std::string(SLIM_DATA_DIR) + "/breastcancer.csv", {"Malignant", "1", "0", {}});
  const auto lat = CoefficientLattice::integer_range(100, d.p());
  SlimConfig cfg = config("0.001", "0.00001");
  cfg.time_limit = std::chrono::milliseconds(1500);
  const SolveReport r = solve(d, lat, cfg);
  CHECK(r.status == SolveStatus::time_limit);
  CHECK(r.gap >= 0);
  CHECK(r.best_lower_bound <= r.objective_value);
  CHECK(r.objective_value == objective(d, r.incumbent, cfg));
  CHECK_NOTHROW(check_feasible(r.incumbent, lat, cfg.intercept));
  REQUIRE_FALSE(r.trace.empty());
  for (std::size_t k = 1; k < r.trace.size(); ++k) {
    CHECK(r.trace[k].incumbent <= r.trace[k - 1].incumbent);
    CHECK(r.trace[k - 1].lower_bound <= r.trace[k].lower_bound);
  }
  CHECK(r.elapsed < std::chrono::milliseconds(5000));
}

TEST_CASE("node limit stops between rounds") {
  const Dataset d = haberman_head(150);
  SlimConfig cfg = config("0.001", "0.00001");
  cfg.node_limit = 10;
  const SolveReport r = solve(d, CoefficientLattice::integer_range(100, d.p()), cfg);
  CHECK(r.status == SolveStatus::node_limit);
  CHECK(r.best_lower_bound <= r.objective_value);
}

TEST_CASE("warm starts") {
  const Dataset d = toy();
  const auto lat = CoefficientLattice::integer_range(2, 1);
  const SlimConfig cfg = config("0.05", "0.01");
  ScoringSystem bad = ScoringSystem::zeros(d);
  bad.coefficients = {7};
  CHECK_THROWS_AS(solve(d, lat, cfg, std::vector<ScoringSystem>{bad}), Error);
  ScoringSystem good = ScoringSystem::zeros(d);
  good.coefficients = {1};
  const SolveReport r = solve(d, lat, cfg, std::vector<ScoringSystem>{good});
  CHECK(r.objective_value <= objective(d, good, cfg));
}

TEST_CASE("invalid inputs are rejected") {
  const Dataset d = toy();
  CHECK_THROWS_AS(solve(d, CoefficientLattice::integer_range(2, 2), config("0.01", "0")), Error);
  SlimConfig cfg = config("0.01", "0");
  cfg.time_limit = std::chrono::milliseconds(0);
  CHECK_THROWS_AS(solve(d, CoefficientLattice::integer_range(2, 1), cfg), Error);
}

TEST_CASE("lexicographic order") {
  ScoringSystem a, b;
  a.coefficients = {0, 1};
  b.coefficients = {1, -5};
  CHECK(lexicographically_less(a, b));
  b.coefficients = {0, 1};
  b.intercept = 1;
  CHECK(lexicographically_less(a, b));
  CHECK_FALSE(lexicographically_less(b, a));
}
