#ifndef SLIM_SOLVER_HPP
#define SLIM_SOLVER_HPP

#include <chrono>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "slim/model.hpp"

namespace slim {

enum class SolveStatus { optimal, time_limit, node_limit };

std::string_view to_string(SolveStatus status);

struct TracePoint {
  std::chrono::milliseconds elapsed{0};
  ObjectiveValue incumbent;
  ObjectiveValue lower_bound;
  std::uint64_t nodes = 0;
};

struct SolveReport {
  ScoringSystem incumbent;
  ObjectiveValue objective_value;
  ObjectiveValue best_lower_bound;
  /// objective_value - best_lower_bound; 0 when optimal.
  double gap = 0;
  std::uint64_t nodes_expanded = 0;
  std::chrono::milliseconds elapsed{0};
  SolveStatus status = SolveStatus::optimal;
  /// Incumbent and bound after the heuristics and after every round of tasks.
  std::vector<TracePoint> trace;
};

/// Exact minimization of the SLIM objective over the lattice by
/// branch-and-bound on coefficient supports. Among equal objectives the
/// lexicographically smallest (lambda_1..lambda_P, lambda_0) is returned.
/// Warm starts must be lattice-feasible; they only seed the incumbent.
SolveReport solve(const Dataset& data, const CoefficientLattice& lattice, const SlimConfig& cfg,
                  std::span<const ScoringSystem> warm_starts = {});

inline constexpr std::uint64_t kDefaultBruteForceCap = 10'000'000;

/// Exhaustive enumeration of every (lambda, lambda_0); the testing oracle.
/// Rejects instances whose candidate count exceeds `cap`.
SolveReport brute_force(const Dataset& data, const CoefficientLattice& lattice, const SlimConfig& cfg,
                        std::uint64_t cap = kDefaultBruteForceCap);

/// Rounded logistic-regression start followed by single-coordinate descent.
ScoringSystem local_search_incumbent(const Dataset& data, const CoefficientLattice& lattice,
                                     const SlimConfig& cfg, std::uint64_t seed);

/// Visits coordinates in a seeded order and moves each to its best lattice
/// value (intercept re-fit) when that strictly lowers the objective. Stops
/// after a pass with no move.
ScoringSystem improve_by_coordinate_moves(const Dataset& data, const CoefficientLattice& lattice,
                                          const SlimConfig& cfg, ScoringSystem start,
                                          std::uint64_t seed = 0);

/// (lambda_1, ..., lambda_P, lambda_0) compared left to right.
bool lexicographically_less(const ScoringSystem& a, const ScoringSystem& b);

}  // namespace slim

#endif  // SLIM_SOLVER_HPP
