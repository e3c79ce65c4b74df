#ifndef SLIM_MODEL_HPP
#define SLIM_MODEL_HPP

#include <chrono>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "slim/error.hpp"

namespace slim {

using Coefficient = std::int64_t;

/// Exact rational number with a positive, gcd-reduced denominator.
class Rational {
 public:
  Rational() = default;
  Rational(__int128 num, __int128 den);

  __int128 num() const { return num_; }
  __int128 den() const { return den_; }
  double to_double() const;

  friend bool operator==(const Rational&, const Rational&) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

 private:
  __int128 num_ = 0;
  __int128 den_ = 1;
};

/// Nonnegative decimal penalty held in fixed point (units of 1e-9) so that
/// objective comparisons never depend on float rounding.
class Penalty {
 public:
  static constexpr std::int64_t kScale = 1'000'000'000;

  constexpr Penalty() = default;
  static Penalty from_nanos(std::int64_t nanos);
  static Penalty from_double(double value);
  /// Parses a plain decimal such as "0.01" or "1e-4" without going through
  /// binary floating point. More than 9 fractional digits is an error.
  static Penalty parse(std::string_view text);

  constexpr std::int64_t nanos() const { return nanos_; }
  double value() const { return static_cast<double>(nanos_) / kScale; }
  std::string to_string() const;

  friend constexpr auto operator<=>(Penalty, Penalty) = default;

 private:
  constexpr explicit Penalty(std::int64_t nanos) : nanos_(nanos) {}
  std::int64_t nanos_ = 0;
};

/// N x P feature matrix (row-major, raw units) with +-1 labels.
class Dataset {
 public:
  Dataset(std::vector<double> features, std::size_t n, std::size_t p,
          std::vector<int> labels, std::vector<std::string> feature_names);

  std::size_t n() const { return n_; }
  std::size_t p() const { return p_; }
  double x(std::size_t i, std::size_t j) const { return features_[i * p_ + j]; }
  std::span<const double> row(std::size_t i) const {
    return {features_.data() + i * p_, p_};
  }
  int y(std::size_t i) const { return labels_[i]; }
  std::span<const int> labels() const { return labels_; }
  std::span<const double> features() const { return features_; }
  const std::vector<std::string>& feature_names() const { return names_; }

  double max_abs_feature() const;
  bool is_binary(std::size_t j) const;
  bool all_integral() const;
  std::size_t positives() const;

  /// Rows in the given order; names are kept.
  Dataset subset(std::span<const std::size_t> rows) const;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::vector<double> features_;
  std::size_t n_ = 0;
  std::size_t p_ = 0;
  std::vector<int> labels_;
  std::vector<std::string> names_;
};

/// Per-feature finite sets of admissible integer coefficients, bounded by
/// `bound` in absolute value. Every set contains 0.
class CoefficientLattice {
 public:
  CoefficientLattice(std::vector<std::vector<Coefficient>> sets, Coefficient bound,
                     std::string id = {});

  static CoefficientLattice uniform(std::vector<Coefficient> values, std::size_t p,
                                    std::string id = {});
  static CoefficientLattice integer_range(Coefficient bound, std::size_t p);

  std::size_t p() const { return sets_.size(); }
  Coefficient bound() const { return bound_; }
  const std::string& id() const { return id_; }
  std::span<const Coefficient> values(std::size_t j) const { return sets_[j]; }
  bool contains(std::size_t j, Coefficient v) const;
  /// True when L_j is every integer in [-bound, bound].
  bool is_full_range(std::size_t j) const;

  friend bool operator==(const CoefficientLattice&, const CoefficientLattice&) = default;

 private:
  std::vector<std::vector<Coefficient>> sets_;
  Coefficient bound_ = 1;
  std::string id_;
};

enum class InterceptPolicy { none, unpenalized, penalized };

std::string_view to_string(InterceptPolicy policy);
InterceptPolicy parse_intercept_policy(std::string_view text);

struct SlimConfig {
  Penalty c0 = Penalty::from_nanos(10'000'000);  // 0.01
  Penalty c1 = Penalty::from_nanos(10'000);      // 1e-5
  double epsilon = 0.1;
  std::optional<double> big_m;  // empty means auto
  InterceptPolicy intercept = InterceptPolicy::unpenalized;
  std::chrono::milliseconds time_limit{std::chrono::minutes(5)};
  unsigned threads = 1;
  std::uint64_t seed = 0;
  /// Deterministic work budget, checked between rounds of subtree tasks. 0 = none.
  std::uint64_t node_limit = 0;

  void validate() const;
};

struct ScoringSystem {
  std::vector<Coefficient> coefficients;
  Coefficient intercept = 0;
  std::vector<std::string> feature_names;
  std::string lattice_id;

  std::size_t p() const { return coefficients.size(); }
  /// Nonzero feature coefficients; the intercept is not counted.
  std::size_t model_size() const;
  Coefficient l1_norm() const;
  /// lambda_0 + sum_j lambda_j x_j, accumulated in feature order.
  double score(std::span<const double> x) const;

  static ScoringSystem zeros(const Dataset& data, std::string lattice_id = {});

  friend bool operator==(const ScoringSystem&, const ScoringSystem&) = default;
};

/// loss_count / n + penalty, kept exact.
class ObjectiveValue {
 public:
  ObjectiveValue() = default;
  ObjectiveValue(std::int64_t loss_count, std::int64_t n, std::int64_t penalty_nanos);

  std::int64_t loss_count() const { return loss_count_; }
  std::int64_t n() const { return n_; }
  std::int64_t penalty_nanos() const { return penalty_nanos_; }

  Rational exact() const;
  double value() const { return exact().to_double(); }

  friend bool operator==(const ObjectiveValue& a, const ObjectiveValue& b) {
    return a.exact() == b.exact();
  }
  friend std::strong_ordering operator<=>(const ObjectiveValue& a, const ObjectiveValue& b) {
    return a.exact() <=> b.exact();
  }

 private:
  std::int64_t loss_count_ = 0;
  std::int64_t n_ = 1;
  std::int64_t penalty_nanos_ = 0;
};

struct GeneralizationBound {
  double empirical_risk = 0;
  double log_k = 0;
  double delta = 0;
  std::int64_t n = 0;
  double bound_value = 0;

  double slack() const { return bound_value - empirical_risk; }
};

/// sign(score) with score 0 mapped to -1.
int predict(const ScoringSystem& model, std::span<const double> x);
std::vector<int> predict(const ScoringSystem& model, const Dataset& data);

std::int64_t misclassified(const Dataset& data, const ScoringSystem& model);
double zero_one_loss(const Dataset& data, const ScoringSystem& model);

/// Penalty part only: c0 * ||lambda||_0 + c1 * ||lambda||_1, plus the
/// intercept's share when the policy penalizes it.
std::int64_t penalty_nanos(const ScoringSystem& model, const SlimConfig& cfg);
ObjectiveValue objective(const Dataset& data, const ScoringSystem& model, const SlimConfig& cfg);

/// Sum_j log |L_j|.
double log_cardinality(const CoefficientLattice& lattice);
/// P log(2 Lambda + 1), the cardinality bound of the full integer box.
double log_cardinality_upper_bound(std::size_t p, Coefficient bound);

GeneralizationBound generalization_bound(double r_emp, double log_k, std::int64_t n,
                                         double delta);

/// Throws dimension_mismatch unless the model, data and (optionally) lattice
/// agree on P, and invalid_input when a coefficient is outside its set.
void check_compatible(const Dataset& data, const ScoringSystem& model);
void check_feasible(const ScoringSystem& model, const CoefficientLattice& lattice,
                    InterceptPolicy policy);

}  // namespace slim

#endif  // SLIM_MODEL_HPP
