#include <cmath>

#include "doctest.h"
#include "slim/model.hpp"

using namespace slim;

namespace {

Dataset toy() {
  // (x=1,+1) (x=2,+1) (x=-1,-1) (x=1,-1)
  return Dataset({1, 2, -1, 1}, 4, 1, {1, 1, -1, -1}, {"x"});
}

ScoringSystem model(std::vector<Coefficient> c, Coefficient b = 0) {
  ScoringSystem m;
  m.coefficients = std::move(c);
  m.intercept = b;
  for (std::size_t j = 0; j < m.coefficients.size(); ++j) m.feature_names.push_back("f" + std::to_string(j));
  return m;
}

SlimConfig penalties(const char* c0, const char* c1) {
  SlimConfig cfg;
  cfg.c0 = Penalty::parse(c0);
  cfg.c1 = Penalty::parse(c1);
  return cfg;
}

}  // namespace

TEST_CASE("rational normalizes sign and common factors") {
  CHECK(Rational(2, 4) == Rational(1, 2));
  CHECK(Rational(3, -6) == Rational(-1, 2));
  CHECK(Rational(1, 3) < Rational(1, 2));
  CHECK(Rational(-1, 2) < Rational(0, 1));
  CHECK_THROWS_AS(Rational(1, 0), Error);
}

TEST_CASE("penalties parse decimals exactly") {
  CHECK(Penalty::parse("0.01").nanos() == 10'000'000);
  CHECK(Penalty::parse("1e-4").nanos() == 100'000);
  CHECK(Penalty::parse("0.000000001").nanos() == 1);
  CHECK(Penalty::parse("2").nanos() == 2'000'000'000);
  CHECK(Penalty::parse("0.01").to_string() == "0.01");
  CHECK_THROWS_AS(Penalty::parse("0.0000000001"), Error);
  CHECK_THROWS_AS(Penalty::parse("-1"), Error);
  CHECK_THROWS_AS(Penalty::parse("abc"), Error);
}

TEST_CASE("predict follows the sign of the score, zero maps to -1") {
  const std::vector<double> x{8, 7, 1};
  CHECK(predict(model({1, 1, 1}, -10), x) == 1);
  CHECK(predict(model({0, 0, 0}), x) == -1);
  CHECK(predict(model({-10, 9, -9}, -1), std::vector<double>{0, 1, 0}) == 1);
  CHECK_THROWS_AS(predict(model({1, 1}), x), Error);
}

TEST_CASE("zero-one loss") {
  CHECK(zero_one_loss(toy(), model({0})) == 1.0);
  CHECK(zero_one_loss(Dataset({1}, 1, 1, {1}, {"x"}), model({1})) == 0.0);
  CHECK(zero_one_loss(toy(), model({1})) == 0.25);
  CHECK_THROWS_AS(zero_one_loss(toy(), model({1, 2})), Error);
}

TEST_CASE("objective adds exact penalties") {
  CHECK(objective(toy(), model({0}), penalties("0.5", "0.3")).exact() == Rational(1, 1));
  // Separable data: both features push the right way.
  const Dataset sep({1, -1, -1, 1}, 2, 2, {1, -1}, {"a", "b"});
  CHECK(objective(sep, model({1, -2}), penalties("0.01", "0.001")).exact() == Rational(23, 1000));
  CHECK(objective(toy(), model({1}), penalties("0.1", "0.01")).exact() == Rational(36, 100));

  SlimConfig cfg = penalties("0.1", "0.01");
  cfg.intercept = InterceptPolicy::penalized;
  // A penalized intercept counts like a coefficient.
  const ObjectiveValue v = objective(toy(), model({1}, 1), cfg);
  CHECK(v.penalty_nanos() == 2 * (100'000'000 + 10'000'000));
  cfg.intercept = InterceptPolicy::none;
  CHECK_THROWS_AS(objective(toy(), model({1}, 1), cfg), Error);
}

TEST_CASE("lattice invariants") {
  CHECK_THROWS_AS(CoefficientLattice({{1, 2}}, 2), Error);
  CHECK_THROWS_AS(CoefficientLattice({{0, 5}}, 2), Error);
  const auto full = CoefficientLattice::integer_range(3, 2);
  CHECK(full.is_full_range(0));
  CHECK(full.values(0).size() == 7);
  CHECK(full.id() == "int[-3,3]");
  const auto sparse = CoefficientLattice::uniform({0, 1, -1, 5, -5}, 2);
  CHECK_FALSE(sparse.is_full_range(1));
  CHECK(sparse.bound() == 5);
  CHECK(sparse.contains(0, -5));
  CHECK_FALSE(sparse.contains(0, 2));
}

TEST_CASE("log cardinality") {
  CHECK(log_cardinality(CoefficientLattice::uniform({0}, 5)) == 0.0);
  CHECK(log_cardinality(CoefficientLattice::integer_range(100, 10)) == doctest::Approx(53.033).epsilon(1e-4));
  CHECK(log_cardinality(CoefficientLattice::uniform({0, 1, -1, 5, -5, 10, -10, 50, -50, 100, -100, 500, -500}, 10)) ==
        doctest::Approx(25.649).epsilon(1e-4));
  CHECK(log_cardinality(CoefficientLattice::integer_range(100, 10)) ==
        doctest::Approx(log_cardinality_upper_bound(10, 100)));
}

TEST_CASE("generalization bound") {
  const auto b = generalization_bound(0.037, 53.033, 683, 0.05);
  CHECK(b.bound_value == doctest::Approx(0.2395).epsilon(1e-3));
  CHECK(b.bound_value >= b.empirical_risk);
  CHECK(generalization_bound(0, 0, 10, 0.999999).bound_value < 1e-3);
  const double s1 = generalization_bound(0.037, 53.033, 683, 0.05).slack();
  const double s2 = generalization_bound(0.037, 53.033, 1366, 0.05).slack();
  CHECK(s2 == doctest::Approx(s1 / std::sqrt(2.0)));
  CHECK_THROWS_AS(generalization_bound(0.1, 1, 10, 1.0), Error);
  CHECK_THROWS_AS(generalization_bound(0.1, 1, 10, 0.0), Error);
}

TEST_CASE("dataset validation") {
  CHECK_THROWS_AS(Dataset({1, 2}, 1, 2, {0}, {"a", "b"}), Error);
  CHECK_THROWS_AS(Dataset({1, NAN}, 1, 2, {1}, {"a", "b"}), Error);
  CHECK_THROWS_AS(Dataset({1, 2}, 1, 2, {1}, {"a", "a"}), Error);
  CHECK_THROWS_AS(Dataset({1, 2}, 1, 2, {1}, {"a"}), Error);
  const Dataset d({0, 1, 1, 3}, 2, 2, {1, -1}, {"a", "b"});
  CHECK(d.is_binary(0));
  CHECK_FALSE(d.is_binary(1));
  CHECK(d.max_abs_feature() == 3);
  CHECK(d.subset(std::vector<std::size_t>{1}).x(0, 1) == 3);
}

TEST_CASE("feasibility checks") {
  const auto lat = CoefficientLattice::uniform({-1, 0, 1}, 2);
  CHECK_NOTHROW(check_feasible(model({1, -1}, 1), lat, InterceptPolicy::unpenalized));
  CHECK_THROWS_AS(check_feasible(model({2, 0}), lat, InterceptPolicy::unpenalized), Error);
  CHECK_THROWS_AS(check_feasible(model({0, 0}, 2), lat, InterceptPolicy::unpenalized), Error);
  CHECK_THROWS_AS(check_feasible(model({0, 0}, 1), lat, InterceptPolicy::none), Error);
  CHECK_THROWS_AS(check_feasible(model({0}), lat, InterceptPolicy::none), Error);
}
