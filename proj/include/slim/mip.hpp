#ifndef SLIM_MIP_HPP
#define SLIM_MIP_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "slim/model.hpp"

namespace slim {

enum class VarKind { binary, integer, continuous };
enum class Sense { le, ge, eq };

struct Variable {
  std::string name;
  VarKind kind = VarKind::continuous;
  double lower = 0;
  double upper = 0;  // +inf allowed
};

struct Constraint {
  std::string name;
  std::vector<std::pair<std::size_t, double>> terms;  // (variable index, coefficient)
  Sense sense = Sense::le;
  double rhs = 0;
};

struct ObjectiveTerm {
  std::size_t var = 0;
  double coef = 0;
  /// Set by the encoder (1/N, c0, c1); absent for coefficients read back from text.
  std::optional<Rational> exact;
};

/// Explicit finite domain of a restricted coefficient and its one-hot selectors.
struct LatticeDomain {
  std::size_t feature = 0;
  std::size_t lambda_var = 0;
  std::vector<Coefficient> values;
  std::vector<std::size_t> selector_vars;
};

/// Where the encoder put each block of variables; only present on encoded instances.
struct SlimLayout {
  std::size_t n = 0;
  std::size_t p = 0;
  std::size_t alpha = 0;  // first alpha_i
  std::size_t beta = 0;
  std::size_t gamma = 0;
  std::size_t lambda = 0;
  std::optional<std::size_t> intercept;
  std::optional<std::size_t> intercept_beta;
  std::optional<std::size_t> intercept_gamma;
  std::size_t core_variables = 0;
  std::size_t core_constraints = 0;
  double big_m = 0;
  double epsilon = 0;
  /// y_i * score_i as a function of the lambda block, for the indicator checks.
  std::vector<int> labels;
  std::vector<double> features;  // row-major copy
};

struct MipInstance {
  std::string name;
  std::vector<Variable> variables;
  std::vector<Constraint> constraints;  // objective sense is always minimize
  std::vector<ObjectiveTerm> objective;
  std::vector<LatticeDomain> lattice_domains;
  std::optional<SlimLayout> layout;

  std::optional<std::size_t> find_variable(std::string_view var_name) const;
};

/// Lambda * max |x_ij|.
double nominal_big_m(const Dataset& data, const CoefficientLattice& lattice);
/// Largest |y_i x_i' lambda| over lattice-feasible lambda (and intercept).
double max_abs_score(const Dataset& data, const CoefficientLattice& lattice, InterceptPolicy policy);
/// Auto: Lambda * max|x_ij|, raised to max_abs_score + epsilon when that is
/// too small to leave every feasible lambda feasible. Explicit values below
/// max_abs_score + epsilon are rejected.
double resolve_big_m(const Dataset& data, const CoefficientLattice& lattice, const SlimConfig& cfg);

MipInstance encode(const Dataset& data, const CoefficientLattice& lattice, const SlimConfig& cfg);

enum class MipFormat { fixed, free };

std::string_view to_string(MipFormat format);
MipFormat parse_mip_format(std::string_view text);

std::string export_mip(const MipInstance& instance, MipFormat format);
MipInstance parse_mip(std::string_view text, MipFormat format);

using ValueMap = std::map<std::string, double, std::less<>>;

struct Violation {
  std::string name;  // constraint or variable
  double amount = 0;
  std::string detail;
};

struct FeasibilityReport {
  bool feasible = true;
  std::vector<Violation> violations;
  double objective_value = 0;
  /// Exact objective when every objective coefficient is exact and the
  /// assignment is integral on those variables.
  std::optional<Rational> exact_objective;
  /// Examples with 0 < y_i x_i' lambda <= epsilon, where the printed big-M rows
  /// admit either value of alpha_i.
  std::vector<std::size_t> slack_zone;
  /// Encoded instances only: alpha/beta/gamma values that do not equal their
  /// indicator (beyond what the slack zone allows).
  std::vector<std::string> indicator_mismatches;
};

FeasibilityReport verify_assignment(const MipInstance& instance, const ValueMap& assignment);

/// (lambda, alpha, beta, gamma, selectors) induced by a model on an encoded instance.
ValueMap induced_assignment(const MipInstance& instance, const ScoringSystem& model);
/// Reads lambda (and intercept) back out of an assignment on an encoded instance.
ScoringSystem model_from_assignment(const MipInstance& instance, const ValueMap& assignment,
                                    const std::vector<std::string>& feature_names);
/// "name value" per line; '#' starts a comment.
ValueMap parse_value_map(std::string_view text);

}  // namespace slim

#endif  // SLIM_MIP_HPP
