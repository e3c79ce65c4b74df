#ifndef SLIM_SRC_SEARCH_CORE_HPP
#define SLIM_SRC_SEARCH_CORE_HPP

// Shared machinery of the exact solver and the local search: a column view of
// the data, the exact best-intercept sweep, and loss lower bounds.

#include <cstdint>
#include <span>
#include <vector>

#include "slim/model.hpp"

namespace slim::detail {

/// Objective in integer units of 1 / (N * 1e9): errors * 1e9 + N * penalty_nanos.
using Key = std::int64_t;

struct Instance {
  Instance(const Dataset& data, const CoefficientLattice& lattice, const SlimConfig& cfg);

  std::size_t n = 0;
  std::size_t p = 0;
  std::vector<int> y;
  std::vector<std::vector<double>> columns;  // per original feature
  const CoefficientLattice* lattice = nullptr;
  InterceptPolicy policy = InterceptPolicy::unpenalized;
  std::int64_t c0 = 0;  // nanos
  std::int64_t c1 = 0;
  Coefficient intercept_lo = 0;
  Coefficient intercept_hi = 0;

  Key key(std::int64_t errors, std::int64_t pen_nanos) const {
    return errors * Penalty::kScale + static_cast<Key>(n) * pen_nanos;
  }
  std::int64_t coefficient_penalty(Coefficient v) const {
    return v == 0 ? 0 : c0 + c1 * (v < 0 ? -v : v);
  }
};

struct InterceptChoice {
  std::int64_t errors = 0;
  Coefficient intercept = 0;
  /// errors * 1e9 + N * (intercept penalty, when penalized).
  Key key = 0;
};

/// Minimizes over the integer intercept domain, for fixed partial scores,
///   #{y=+1 : s_pos + b <= 0} + #{y=-1 : s_neg + b >= 0} (+ intercept penalty)
/// returning the smallest minimizing intercept. With s_pos = s_neg = s this
/// is the exact leaf value; with s_pos = s + hi, s_neg = s + lo it counts
/// examples misclassified under every completion.
class InterceptSweep {
 public:
  explicit InterceptSweep(const Instance& inst);

  InterceptChoice best(std::span<const double> s_pos, std::span<const double> s_neg,
                       bool with_penalty);
  InterceptChoice best(std::span<const double> s, bool with_penalty = true) {
    return best(s, s, with_penalty);
  }

 private:
  InterceptChoice best_binned(std::span<const double> s_pos, std::span<const double> s_neg,
                              bool with_penalty);
  InterceptChoice best_sorted(std::span<const double> s_pos, std::span<const double> s_neg,
                              bool with_penalty);
  std::int64_t intercept_penalty(Coefficient b, bool with_penalty) const;

  const Instance& inst_;
  std::int64_t t_lo_;  // t = -intercept
  std::int64_t t_hi_;
  std::vector<std::int32_t> pos_bins_;
  std::vector<std::int32_t> neg_bins_;
  std::vector<std::int64_t> pos_thresholds_;
  std::vector<std::int64_t> neg_thresholds_;
  std::vector<std::int64_t> candidates_;
};

/// Examples that agree on every free feature share the free part of their
/// score, so within such a group the best any completion can do is the best
/// one-dimensional threshold on the fixed part. Summed over groups this is a
/// valid loss lower bound, independent of the coefficient bounds.
class GroupBound {
 public:
  /// `group_of[i]` labels examples with identical free-feature values.
  GroupBound(const Instance& inst, std::span<const std::uint32_t> group_of);

  std::int64_t lower_bound(std::span<const double> s,
                          std::vector<std::pair<double, int>>& scratch) const;
  bool trivial() const { return members_.empty(); }

 private:
  const Instance& inst_;
  std::vector<std::uint32_t> members_;  // example indices, grouped
  std::vector<std::uint32_t> offsets_;  // group g is members_[offsets_[g], offsets_[g+1])
};

/// Group labels for every suffix of `order`: entry d groups examples by their
/// values on order[d..p).
std::vector<std::vector<std::uint32_t>> suffix_groupings(const Instance& inst,
                                                         std::span<const std::size_t> order);

/// Incumbent candidate compared by (key, lambda in feature order, intercept).
struct Candidate {
  Key key = 0;
  std::vector<Coefficient> coefficients;  // original feature order
  Coefficient intercept = 0;

  bool better_than(const Candidate& other) const;
};

/// Minimum-error best intercept for a full coefficient vector (feature order).
Candidate evaluate(const Instance& inst, InterceptSweep& sweep, std::span<const Coefficient> lambda,
                   std::vector<double>& scratch);

}  // namespace slim::detail

#endif  // SLIM_SRC_SEARCH_CORE_HPP
