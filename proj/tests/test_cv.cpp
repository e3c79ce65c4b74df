#include <algorithm>
#include <set>

#include "doctest.h"
#include "slim/cv.hpp"
#include "support.hpp"

using namespace slim;

namespace {

Dataset labelled(std::vector<int> y) {
  const std::size_t n = y.size();
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<double>(i);
  return Dataset(std::move(x), n, 1, std::move(y), {"x"});
}

CvResult fake_result(std::vector<double> errors, std::vector<std::size_t> sizes) {
  CvResult r;
  double sum = 0;
  std::vector<double> s;
  for (std::size_t f = 0; f < errors.size(); ++f) {
    FoldResult fr;
    fr.fold = f;
    fr.test_error = errors[f];
    fr.model_size = sizes[f];
    r.per_fold.push_back(fr);
    sum += errors[f];
    s.push_back(static_cast<double>(sizes[f]));
  }
  r.mean_test_error = sum / static_cast<double>(errors.size());
  r.median_model_size = median(s);
  return r;
}

}  // namespace

TEST_CASE("stratified folds on a balanced set") {
  const Dataset d = labelled({1, 1, 1, 1, 1, -1, -1, -1, -1, -1});
  CvPlan plan;
  const auto folds = make_folds(d, plan);
  REQUIRE(folds.size() == 5);
  std::set<std::size_t> seen;
  for (const auto& f : folds) {
    CHECK(f.size() == 2);
    CHECK(std::is_sorted(f.begin(), f.end()));
    int pos = 0;
    for (auto i : f) pos += d.y(i) == 1;
    CHECK(pos == 1);
    seen.insert(f.begin(), f.end());
  }
  CHECK(seen.size() == 10);
  CHECK(make_folds(d, plan) == folds);
  plan.seed = 1;
  CHECK(make_folds(d, plan).size() == 5);
}

TEST_CASE("fold sizes differ by at most one") {
  const Dataset d = labelled({1, -1, 1, -1, 1, -1, -1});
  const auto folds = make_folds(d, CvPlan{});
  std::vector<std::size_t> sizes;
  for (const auto& f : folds) sizes.push_back(f.size());
  std::sort(sizes.begin(), sizes.end());
  CHECK(sizes == std::vector<std::size_t>{1, 1, 1, 2, 2});
  CvPlan plain;
  plain.stratified = false;
  sizes.clear();
  for (const auto& f : make_folds(d, plain)) sizes.push_back(f.size());
  std::sort(sizes.begin(), sizes.end());
  CHECK(sizes == std::vector<std::size_t>{1, 1, 1, 2, 2});
}

TEST_CASE("invalid fold plans") {
  const Dataset d = labelled({1, -1, 1});
  CvPlan plan;
  CHECK_THROWS_AS(make_folds(d, plan), Error);  // k > N
  plan.k = 1;
  CHECK_THROWS_AS(make_folds(d, plan), Error);
  // A training side without negatives.
  const Dataset lonely = labelled({1, 1, 1, 1, 1, -1});
  plan.k = 5;
  CHECK_THROWS_AS(cross_validate(lonely, CoefficientLattice::integer_range(3, 1), SlimConfig{}, plan), Error);
}

TEST_CASE("a perfect single-feature predictor") {
  std::vector<double> x;
  std::vector<int> y;
  for (int i = 0; i < 20; ++i) {
    const int v = i % 2;
    x.push_back(v);
    x.push_back((i / 3) % 2);
    y.push_back(v ? 1 : -1);
  }
  const Dataset d(x, 20, 2, y, {"good", "noise"});
  SlimConfig cfg;
  cfg.c0 = Penalty::parse("0.01");
  cfg.c1 = Penalty::parse("0.0001");
  cfg.time_limit = std::chrono::seconds(10);
  const CvResult r = cross_validate(d, CoefficientLattice::integer_range(5, 2), cfg, CvPlan{});
  CHECK(r.mean_test_error == 0);
  CHECK(r.median_model_size == 1);
  for (const auto& f : r.per_fold) {
    CHECK(f.status == SolveStatus::optimal);
    CHECK(f.model.coefficients[1] == 0);
  }
}

TEST_CASE("brute-force trainer and solve give identical results") {
  testing::Gen g(8);
  const Dataset d = testing::random_dataset(g, 40, 3, -2, 2);
  const auto lat = CoefficientLattice::integer_range(2, 3);
  SlimConfig cfg;
  cfg.c0 = Penalty::parse("0.02");
  cfg.c1 = Penalty::parse("0.001");
  cfg.time_limit = std::chrono::seconds(20);
  const Trainer bf = [](const Dataset& data, const CoefficientLattice& l, const SlimConfig& c) {
    return brute_force(data, l, c);
  };
  const CvResult a = cross_validate(d, lat, cfg, CvPlan{});
  CvPlan par;
  par.parallel_folds = 3;
  const CvResult b = cross_validate(d, lat, cfg, par, bf);
  CHECK(a.mean_test_error == b.mean_test_error);
  CHECK(a.median_model_size == b.median_model_size);
  REQUIRE(a.per_fold.size() == b.per_fold.size());
  for (std::size_t f = 0; f < a.per_fold.size(); ++f) {
    CHECK(a.per_fold[f].model == b.per_fold[f].model);
    CHECK(a.per_fold[f].test_error == b.per_fold[f].test_error);
    CHECK(a.per_fold[f].train_error == b.per_fold[f].train_error);
  }
}

TEST_CASE("trainer errors name the fold") {
  const Dataset d = labelled({1, -1, 1, -1, 1, -1, 1, -1, 1, -1});
  const Trainer boom = [](const Dataset&, const CoefficientLattice&, const SlimConfig&) -> SolveReport {
    throw Error(ErrorCode::invalid_input, "bad");
  };
  try {
    cross_validate(d, CoefficientLattice::integer_range(1, 1), SlimConfig{}, CvPlan{}, boom);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).rfind("fold 0: ", 0) == 0);
  }
}

TEST_CASE("grid selection picks penalties from the grid") {
  testing::Gen g(12);
  const Dataset d = testing::random_dataset(g, 30, 2, -2, 2);
  SlimConfig cfg;
  cfg.time_limit = std::chrono::seconds(20);
  PenaltyGrid grid{{Penalty::parse("0.01"), Penalty::parse("0.5")}, {Penalty::parse("0")}};
  CvPlan plan;
  plan.k = 3;
  const CvResult r = cross_validate_selected(d, CoefficientLattice::integer_range(2, 2), cfg, plan, grid);
  REQUIRE(r.per_fold.size() == 3);
  for (const auto& f : r.per_fold) {
    CHECK((f.c0 == grid.c0[0] || f.c0 == grid.c0[1]));
    CHECK(f.c1 == grid.c1[0]);
  }
  CHECK_THROWS_AS(cross_validate_selected(d, CoefficientLattice::integer_range(2, 2), cfg, plan, PenaltyGrid{}),
                  Error);
}

TEST_CASE("median") {
  CHECK(median({3}) == 3);
  CHECK(median({4, 1, 2}) == 2);
  CHECK(median({4, 1, 2, 3}) == 2.5);
  CHECK_THROWS_AS(median({}), Error);
}

TEST_CASE("result table") {
  const CvResult r = fake_result({0.2, 0.25, 0.21, 0.24, 0.26}, {3, 3, 2, 4, 3});
  const ResultTable t = report_table({{"haberman", r}});
  CHECK(t.text.find("23.2%") != std::string::npos);
  CHECK(t.text.find("model size") != std::string::npos);
  CHECK(t.csv.rfind("dataset,mean_test_error,median_model_size,folds\n", 0) == 0);
  CHECK(t.csv.find("haberman,") != std::string::npos);

  const ResultTable two = report_table({{"b", r}, {"a", fake_result({0.1}, {1})}});
  CHECK(two.text.find("\nb ") < two.text.find("\na "));
  CHECK_THROWS_AS(report_table({}), Error);
  CHECK_THROWS_AS(report_table({{"x", r}, {"x", r}}), Error);
  CHECK_THROWS_AS(report_table({{"empty", CvResult{}}}), Error);
}
