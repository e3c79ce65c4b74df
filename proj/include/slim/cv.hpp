#ifndef SLIM_CV_HPP
#define SLIM_CV_HPP

#include <chrono>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "slim/solver.hpp"

namespace slim {

struct CvPlan {
  std::size_t k = 5;
  std::uint64_t seed = 0;
  bool stratified = true;
  /// Folds trained concurrently; results do not depend on it.
  unsigned parallel_folds = 1;
};

struct FoldResult {
  std::size_t fold = 0;
  double test_error = 0;
  double train_error = 0;
  std::size_t model_size = 0;
  double gap = 0;
  std::chrono::milliseconds elapsed{0};
  SolveStatus status = SolveStatus::optimal;
  ScoringSystem model;
  /// Penalties used for this fold (differ from the base config under grid selection).
  Penalty c0;
  Penalty c1;
};

struct CvResult {
  std::vector<FoldResult> per_fold;
  double mean_test_error = 0;
  double median_model_size = 0;
};

/// Test-index sets, each sorted. Stratified: each class is shuffled and dealt
/// round-robin, positives first, the deal continuing across classes.
std::vector<std::vector<std::size_t>> make_folds(const Dataset& data, const CvPlan& plan);

using Trainer = std::function<SolveReport(const Dataset&, const CoefficientLattice&, const SlimConfig&)>;

/// Each fold gets cfg.time_limit / k. The default trainer is `solve`.
CvResult cross_validate(const Dataset& data, const CoefficientLattice& lattice, const SlimConfig& cfg,
                        const CvPlan& plan, const Trainer& trainer = {});

struct PenaltyGrid {
  std::vector<Penalty> c0;
  std::vector<Penalty> c1;
};

/// Nested selection: inside every outer fold, (c0, c1) is chosen by an inner
/// CV on the training part (lowest mean test error, then earliest in the
/// grid), then refit on that training part. Budgets split evenly.
CvResult cross_validate_selected(const Dataset& data, const CoefficientLattice& lattice,
                                 const SlimConfig& cfg, const CvPlan& plan, const PenaltyGrid& grid,
                                 const Trainer& trainer = {});

double median(std::vector<double> values);

struct ResultTable {
  std::string text;
  std::string csv;
};

/// Two rows per dataset (error %, model size), in input order.
ResultTable report_table(const std::vector<std::pair<std::string, CvResult>>& results);

}  // namespace slim

#endif  // SLIM_CV_HPP
