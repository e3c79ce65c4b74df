#include <algorithm>
#include <sstream>

#include "doctest.h"
#include "slim/mip.hpp"
#include "support.hpp"

using namespace slim;

namespace {

Dataset four_by_two() {
  return Dataset({1, 0, 0, 1, 2, -1, -1, 1}, 4, 2, {1, -1, 1, -1}, {"a", "b"});
}

SlimConfig no_intercept() {
  SlimConfig cfg;
  cfg.intercept = InterceptPolicy::none;
  return cfg;
}

ScoringSystem model(std::vector<Coefficient> c, Coefficient b = 0) {
  ScoringSystem m;
  m.coefficients = std::move(c);
  m.intercept = b;
  m.feature_names = testing::names(m.coefficients.size());
  return m;
}

std::size_t count_lines_between(const std::string& doc, const std::string& from, const std::string& to) {
  std::istringstream in(doc);
  std::string line;
  bool inside = false;
  std::size_t count = 0;
  while (std::getline(in, line)) {
    if (line.rfind(from, 0) == 0) {
      inside = true;
      continue;
    }
    if (line.rfind(to, 0) == 0) break;
    if (inside && !line.empty()) ++count;
  }
  return count;
}

}  // namespace

TEST_CASE("encoding of a 4 x 2 instance without intercept") {
  const MipInstance mip = encode(four_by_two(), CoefficientLattice::integer_range(100, 2), no_intercept());
  CHECK(mip.variables.size() == 10);
  CHECK(mip.constraints.size() == 16);
  CHECK(mip.lattice_domains.empty());
  // Objective: 1/N on alpha, c0 on beta, c1 on gamma, all exact.
  for (const auto& t : mip.objective) REQUIRE(t.exact.has_value());
  const auto a1 = *mip.find_variable("a1");
  auto term = std::find_if(mip.objective.begin(), mip.objective.end(), [&](const ObjectiveTerm& t) { return t.var == a1; });
  REQUIRE(term != mip.objective.end());
  CHECK(*term->exact == Rational(1, 4));
}

TEST_CASE("intercept policies add variables") {
  const Dataset d = four_by_two();
  SlimConfig cfg;
  const auto lat = CoefficientLattice::integer_range(10, 2);
  cfg.intercept = InterceptPolicy::unpenalized;
  CHECK(encode(d, lat, cfg).variables.size() == 11);
  CHECK(encode(d, lat, cfg).constraints.size() == 16);
  cfg.intercept = InterceptPolicy::penalized;
  CHECK(encode(d, lat, cfg).variables.size() == 13);
  CHECK(encode(d, lat, cfg).constraints.size() == 20);
}

TEST_CASE("restricted lattices add one-hot selectors") {
  const auto lat = CoefficientLattice::uniform({0, 1, -1, 5, -5}, 2);
  const MipInstance mip = encode(four_by_two(), lat, no_intercept());
  REQUIRE(mip.lattice_domains.size() == 2);
  CHECK(mip.lattice_domains[0].values.size() == 5);
  CHECK(mip.variables.size() == 10 + 2 * 5);
  CHECK(mip.constraints.size() == 16 + 2 * 2);
  REQUIRE(mip.layout);
  CHECK(mip.layout->core_variables == 10);
  CHECK(mip.layout->core_constraints == 16);
}

TEST_CASE("big-M resolution") {
  const Dataset d({10, -3, 2, 1}, 2, 2, {1, -1}, {"a", "b"});
  const auto lat = CoefficientLattice::integer_range(100, 2);
  CHECK(nominal_big_m(d, lat) == 1000);
  SlimConfig cfg = no_intercept();
  // Auto mode never goes below what every feasible lambda needs.
  CHECK(resolve_big_m(d, lat, cfg) >= max_abs_score(d, lat, cfg.intercept) + cfg.epsilon);
  cfg.big_m = 5000;
  CHECK(resolve_big_m(d, lat, cfg) == 5000);
  cfg.big_m = 100;
  CHECK_THROWS_AS(encode(d, lat, cfg), Error);
}

TEST_CASE("single example: a correct fixed lambda forces alpha to 0") {
  const Dataset d({1}, 1, 1, {1}, {"x"});
  const MipInstance mip = encode(d, CoefficientLattice::uniform({0, 1}, 1), no_intercept());
  ValueMap v = induced_assignment(mip, model({1}));
  CHECK(v.at("a1") == 0);
  CHECK(verify_assignment(mip, v).feasible);
  v["a1"] = 1;
  CHECK_FALSE(verify_assignment(mip, v).feasible);
}

TEST_CASE("verify_assignment reports violations by row") {
  const Dataset d = four_by_two();
  const auto lat = CoefficientLattice::integer_range(3, 2);
  const MipInstance mip = encode(d, lat, no_intercept());

  SUBCASE("all-zero lambda with every alpha = 1 is feasible") {
    ValueMap v;
    for (const auto& var : mip.variables) v[var.name] = 0;
    for (int i = 1; i <= 4; ++i) v["a" + std::to_string(i)] = 1;
    const auto rep = verify_assignment(mip, v);
    CHECK(rep.feasible);
    CHECK(rep.exact_objective == Rational(1, 1));
  }
  SUBCASE("a misclassified example with alpha = 0 breaks its big-M row") {
    ValueMap v = induced_assignment(mip, model({-1, 0}));  // example 1: y=+1, score -1
    v["a1"] = 0;
    const auto rep = verify_assignment(mip, v);
    CHECK_FALSE(rep.feasible);
    CHECK(std::any_of(rep.violations.begin(), rep.violations.end(),
                      [](const Violation& x) { return x.name == "lo1"; }));
  }
  SUBCASE("gamma below |lambda| breaks the absolute-value rows") {
    ValueMap v = induced_assignment(mip, model({2, 0}));
    v["g1"] = 1;
    const auto rep = verify_assignment(mip, v);
    CHECK_FALSE(rep.feasible);
    CHECK(std::any_of(rep.violations.begin(), rep.violations.end(),
                      [](const Violation& x) { return x.name == "al1" || x.name == "au1"; }));
  }
  SUBCASE("missing values are rejected") {
    ValueMap v = induced_assignment(mip, model({1, 1}));
    v.erase("g2");
    CHECK_THROWS_AS(verify_assignment(mip, v), Error);
  }
}

TEST_CASE("model_from_assignment inverts induced_assignment") {
  testing::Gen g(5);
  const Dataset d = testing::random_dataset(g, 12, 3, -2, 2);
  const auto lat = CoefficientLattice::uniform({0, 1, -1, 4, -4}, 3);
  SlimConfig cfg;
  const MipInstance mip = encode(d, lat, cfg);
  const ScoringSystem m = model({4, 0, -1}, -2);
  CHECK(model_from_assignment(mip, induced_assignment(mip, m), d.feature_names()).coefficients == m.coefficients);
  CHECK(model_from_assignment(mip, induced_assignment(mip, m), d.feature_names()).intercept == -2);
}

TEST_CASE("parse_value_map") {
  const ValueMap v = parse_value_map("# solution\nl1 2\n  a1   0  \n\nb1 1 # trailing\n");
  CHECK(v.size() == 3);
  CHECK(v.at("l1") == 2);
  CHECK(v.at("b1") == 1);
  CHECK_THROWS_AS(parse_value_map("l1\n"), Error);
}

TEST_CASE("export: declarations and rows") {
  const MipInstance mip = encode(four_by_two(), CoefficientLattice::integer_range(100, 2), no_intercept());
  const std::string mps = export_mip(mip, MipFormat::fixed);
  CHECK(count_lines_between(mps, "ROWS", "COLUMNS") == 17);  // objective + 16
  CHECK(mps.find("OBJSENSE") != std::string::npos);
  const std::string lp = export_mip(mip, MipFormat::free);
  CHECK(count_lines_between(lp, "Subject To", "Bounds") == 16);
  CHECK(count_lines_between(lp, "Bounds", "Binaries") == 10);
  CHECK(lp.rfind("\\ Problem name:", 0) == 0);
  CHECK(lp.find("Minimize") != std::string::npos);
}

TEST_CASE("export: one integer variable and no rows") {
  MipInstance mip;
  mip.name = "single";
  mip.variables.push_back(Variable{"x", VarKind::integer, -5, 7});
  for (MipFormat f : {MipFormat::fixed, MipFormat::free}) {
    const std::string doc = export_mip(mip, f);
    const MipInstance back = parse_mip(doc, f);
    REQUIRE(back.variables.size() == 1);
    CHECK(back.variables[0].name == "x");
    CHECK(back.variables[0].kind == VarKind::integer);
    CHECK(back.variables[0].lower == -5);
    CHECK(back.variables[0].upper == 7);
    CHECK(back.constraints.empty());
  }
}

TEST_CASE("export is deterministic and a fixed point of parse") {
  testing::Gen g(99);
  for (int t = 0; t < 20; ++t) {
    const Dataset d = testing::random_dataset(g, static_cast<std::size_t>(g.integer(1, 15)),
                                              static_cast<std::size_t>(g.integer(1, 4)), -5, 5);
    const auto lat = t % 2 ? CoefficientLattice::integer_range(20, d.p())
                           : CoefficientLattice::uniform({0, 1, -1, 10, -10}, d.p());
    SlimConfig cfg;
    cfg.c0 = testing::random_penalty(g, 50'000'000);
    cfg.c1 = testing::random_penalty(g, 5'000'000);
    cfg.intercept = static_cast<InterceptPolicy>(t % 3);
    const MipInstance mip = encode(d, lat, cfg);
    for (MipFormat f : {MipFormat::fixed, MipFormat::free}) {
      const std::string first = export_mip(mip, f);
      CHECK(first == export_mip(encode(d, lat, cfg), f));
      const std::string second = export_mip(parse_mip(first, f), f);
      CHECK(second == first);
    }
  }
}

TEST_CASE("fixed format rejects long names") {
  MipInstance mip;
  mip.variables.push_back(Variable{"much_too_long_name", VarKind::continuous, 0, 1});
  CHECK_THROWS_AS(export_mip(mip, MipFormat::fixed), Error);
  CHECK_NOTHROW(export_mip(mip, MipFormat::free));
}

TEST_CASE("format names") {
  CHECK(parse_mip_format("interchange-fixed") == MipFormat::fixed);
  CHECK(parse_mip_format("interchange-free") == MipFormat::free);
  CHECK_THROWS_AS(parse_mip_format("xml"), Error);
}
