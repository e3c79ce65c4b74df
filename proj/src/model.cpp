#include "slim/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <set>
#include <unordered_set>

namespace slim {

namespace {

__int128 gcd128(__int128 a, __int128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    __int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

// Maximum penalty accepted by validate(); keeps n * penalty well inside int64.
constexpr std::int64_t kMaxPenaltyNanos = 1000 * Penalty::kScale;

}  // namespace

Rational::Rational(__int128 num, __int128 den) {
  if (den == 0) throw Error(ErrorCode::invalid_input, "rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  __int128 g = gcd128(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  num_ = num;
  den_ = den;
}

double Rational::to_double() const {
  return static_cast<double>(static_cast<long double>(num_) / static_cast<long double>(den_));
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  // Denominators in this library stay below 2^63, numerators far below, so
  // the cross products fit in 128 bits.
  __int128 lhs = a.num_ * b.den_;
  __int128 rhs = b.num_ * a.den_;
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

// ---------------------------------------------------------------------------

Penalty Penalty::from_nanos(std::int64_t nanos) {
  if (nanos < 0) throw Error(ErrorCode::invalid_config, "penalty must be nonnegative");
  return Penalty(nanos);
}

Penalty Penalty::from_double(double value) {
  if (!std::isfinite(value) || value < 0)
    throw Error(ErrorCode::invalid_config, "penalty must be a finite nonnegative number");
  if (value > 9.0e9) throw Error(ErrorCode::invalid_config, "penalty too large");
  return Penalty(std::llround(value * kScale));
}

Penalty Penalty::parse(std::string_view text) {
  auto fail = [&](const std::string& why) {
    return Error(ErrorCode::parse_error, "bad penalty '" + std::string(text) + "': " + why);
  };
  std::size_t pos = 0;
  while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  if (pos < text.size() && text[pos] == '+') ++pos;
  if (pos < text.size() && text[pos] == '-') throw fail("must be nonnegative");

  std::string digits;
  int frac_digits = 0;
  bool seen_point = false;
  bool any_digit = false;
  for (; pos < text.size(); ++pos) {
    char c = text[pos];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits.push_back(c);
      any_digit = true;
      if (seen_point) ++frac_digits;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!any_digit) throw fail("no digits");
  int exponent = 0;
  if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
    ++pos;
    bool negative = false;
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) negative = text[pos++] == '-';
    if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos])))
      throw fail("malformed exponent");
    int e = 0;
    for (; pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])); ++pos) {
      e = e * 10 + (text[pos] - '0');
      if (e > 400) throw fail("exponent out of range");
    }
    exponent = negative ? -e : e;
  }
  while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  if (pos != text.size()) throw fail("trailing characters");

  // value = digits * 10^(exponent - frac_digits); we want value * 1e9.
  int shift = exponent - frac_digits + 9;
  digits.erase(0, std::min(digits.find_first_not_of('0'), digits.size()));
  if (digits.empty()) return Penalty(0);
  if (shift < 0) {
    std::size_t drop = static_cast<std::size_t>(-shift);
    if (drop >= digits.size()) throw fail("finer than 1e-9");
    for (std::size_t k = digits.size() - drop; k < digits.size(); ++k)
      if (digits[k] != '0') throw fail("finer than 1e-9");
    digits.resize(digits.size() - drop);
    shift = 0;
  }
  if (digits.size() + static_cast<std::size_t>(shift) > 18) throw fail("too large");
  std::int64_t nanos = 0;
  for (char c : digits) nanos = nanos * 10 + (c - '0');
  for (int k = 0; k < shift; ++k) nanos *= 10;
  return Penalty(nanos);
}

std::string Penalty::to_string() const {
  std::string whole = std::to_string(nanos_ / kScale);
  std::int64_t frac = nanos_ % kScale;
  if (frac == 0) return whole;
  std::string f = std::to_string(frac);
  f.insert(0, 9 - f.size(), '0');
  while (!f.empty() && f.back() == '0') f.pop_back();
  return whole + "." + f;
}

// ---------------------------------------------------------------------------

Dataset::Dataset(std::vector<double> features, std::size_t n, std::size_t p,
                 std::vector<int> labels, std::vector<std::string> feature_names)
    : features_(std::move(features)),
      n_(n),
      p_(p),
      labels_(std::move(labels)),
      names_(std::move(feature_names)) {
  if (n_ < 1 || p_ < 1) throw Error(ErrorCode::invalid_input, "dataset needs N >= 1 and P >= 1");
  if (features_.size() != n_ * p_)
    throw Error(ErrorCode::dimension_mismatch, "feature matrix size does not equal N*P");
  if (labels_.size() != n_) throw Error(ErrorCode::dimension_mismatch, "label count does not equal N");
  if (names_.size() != p_)
    throw Error(ErrorCode::dimension_mismatch, "feature name count does not equal P");
  for (std::size_t k = 0; k < features_.size(); ++k) {
    if (!std::isfinite(features_[k]))
      throw Error(ErrorCode::invalid_input, "non-finite feature value at row " +
                                                std::to_string(k / p_) + ", column " +
                                                std::to_string(k % p_));
  }
  for (std::size_t i = 0; i < n_; ++i) {
    if (labels_[i] != 1 && labels_[i] != -1)
      throw Error(ErrorCode::invalid_input, "label at row " + std::to_string(i) + " is not -1/+1");
  }
  std::unordered_set<std::string> seen;
  for (const auto& name : names_) {
    if (name.empty()) throw Error(ErrorCode::invalid_input, "empty feature name");
    if (!seen.insert(name).second)
      throw Error(ErrorCode::invalid_input, "duplicate feature name '" + name + "'");
  }
}

double Dataset::max_abs_feature() const {
  double m = 0;
  for (double v : features_) m = std::max(m, std::abs(v));
  return m;
}

bool Dataset::is_binary(std::size_t j) const {
  for (std::size_t i = 0; i < n_; ++i) {
    double v = x(i, j);
    if (v != 0.0 && v != 1.0) return false;
  }
  return true;
}

bool Dataset::all_integral() const {
  return std::all_of(features_.begin(), features_.end(),
                     [](double v) { return v == std::nearbyint(v); });
}

std::size_t Dataset::positives() const {
  return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), 1));
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  std::vector<double> f;
  f.reserve(rows.size() * p_);
  std::vector<int> y;
  y.reserve(rows.size());
  for (std::size_t r : rows) {
    if (r >= n_) throw Error(ErrorCode::invalid_input, "subset row out of range");
    auto src = row(r);
    f.insert(f.end(), src.begin(), src.end());
    y.push_back(labels_[r]);
  }
  return Dataset(std::move(f), rows.size(), p_, std::move(y), names_);
}

// ---------------------------------------------------------------------------

CoefficientLattice::CoefficientLattice(std::vector<std::vector<Coefficient>> sets,
                                       Coefficient bound, std::string id)
    : sets_(std::move(sets)), bound_(bound), id_(std::move(id)) {
  if (sets_.empty()) throw Error(ErrorCode::invalid_input, "lattice needs at least one coordinate");
  if (bound_ < 1) throw Error(ErrorCode::invalid_input, "lattice bound must be a positive integer");
  for (std::size_t j = 0; j < sets_.size(); ++j) {
    auto& s = sets_[j];
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    if (!std::binary_search(s.begin(), s.end(), Coefficient{0}))
      throw Error(ErrorCode::invalid_input,
                  "lattice coordinate " + std::to_string(j) + " does not contain 0");
    if (-s.front() > bound_ || s.back() > bound_)
      throw Error(ErrorCode::invalid_input,
                  "lattice coordinate " + std::to_string(j) + " exceeds the bound " +
                      std::to_string(bound_));
  }
}

CoefficientLattice CoefficientLattice::uniform(std::vector<Coefficient> values, std::size_t p,
                                               std::string id) {
  Coefficient bound = 1;
  for (Coefficient v : values) bound = std::max(bound, v < 0 ? -v : v);
  return CoefficientLattice(std::vector<std::vector<Coefficient>>(p, values), bound, std::move(id));
}

CoefficientLattice CoefficientLattice::integer_range(Coefficient bound, std::size_t p) {
  if (bound < 1) throw Error(ErrorCode::invalid_input, "lattice bound must be a positive integer");
  std::vector<Coefficient> values(static_cast<std::size_t>(2 * bound + 1));
  std::iota(values.begin(), values.end(), -bound);
  return CoefficientLattice(std::vector<std::vector<Coefficient>>(p, values), bound,
                            "int[" + std::to_string(-bound) + "," + std::to_string(bound) + "]");
}

bool CoefficientLattice::contains(std::size_t j, Coefficient v) const {
  return std::binary_search(sets_[j].begin(), sets_[j].end(), v);
}

bool CoefficientLattice::is_full_range(std::size_t j) const {
  const auto& s = sets_[j];
  return s.size() == static_cast<std::size_t>(2 * bound_ + 1) && s.front() == -bound_ &&
         s.back() == bound_;
}

// ---------------------------------------------------------------------------

std::string_view to_string(InterceptPolicy policy) {
  switch (policy) {
    case InterceptPolicy::none: return "none";
    case InterceptPolicy::unpenalized: return "unpenalized";
    case InterceptPolicy::penalized: return "penalized";
  }
  return "unpenalized";
}

InterceptPolicy parse_intercept_policy(std::string_view text) {
  if (text == "none") return InterceptPolicy::none;
  if (text == "unpenalized") return InterceptPolicy::unpenalized;
  if (text == "penalized") return InterceptPolicy::penalized;
  throw Error(ErrorCode::parse_error, "unknown intercept policy '" + std::string(text) + "'");
}

void SlimConfig::validate() const {
  if (c0.nanos() > kMaxPenaltyNanos || c1.nanos() > kMaxPenaltyNanos)
    throw Error(ErrorCode::invalid_config, "penalties above 1000 are not supported");
  if (!(epsilon > 0) || !std::isfinite(epsilon))
    throw Error(ErrorCode::invalid_config, "epsilon must be positive");
  if (big_m && (!(*big_m > 0) || !std::isfinite(*big_m)))
    throw Error(ErrorCode::invalid_config, "big-M must be positive");
  if (time_limit.count() <= 0) throw Error(ErrorCode::invalid_config, "time limit must be positive");
  if (threads < 1) throw Error(ErrorCode::invalid_config, "threads must be at least 1");
}

// ---------------------------------------------------------------------------

std::size_t ScoringSystem::model_size() const {
  return static_cast<std::size_t>(
      std::count_if(coefficients.begin(), coefficients.end(), [](Coefficient c) { return c != 0; }));
}

Coefficient ScoringSystem::l1_norm() const {
  Coefficient s = 0;
  for (Coefficient c : coefficients) s += c < 0 ? -c : c;
  return s;
}

double ScoringSystem::score(std::span<const double> x) const {
  double s = static_cast<double>(intercept);
  for (std::size_t j = 0; j < coefficients.size(); ++j)
    if (coefficients[j] != 0) s += static_cast<double>(coefficients[j]) * x[j];
  return s;
}

ScoringSystem ScoringSystem::zeros(const Dataset& data, std::string lattice_id) {
  return ScoringSystem{std::vector<Coefficient>(data.p(), 0), 0, data.feature_names(),
                       std::move(lattice_id)};
}

ObjectiveValue::ObjectiveValue(std::int64_t loss_count, std::int64_t n,
                               std::int64_t penalty_nanos)
    : loss_count_(loss_count), n_(n), penalty_nanos_(penalty_nanos) {
  if (n < 1 || loss_count < 0 || loss_count > n || penalty_nanos < 0)
    throw Error(ErrorCode::invalid_input, "malformed objective value");
}

Rational ObjectiveValue::exact() const {
  __int128 num = static_cast<__int128>(loss_count_) * Penalty::kScale +
                 static_cast<__int128>(n_) * penalty_nanos_;
  return Rational(num, static_cast<__int128>(n_) * Penalty::kScale);
}

// ---------------------------------------------------------------------------

void check_compatible(const Dataset& data, const ScoringSystem& model) {
  if (model.coefficients.size() != data.p())
    throw Error(ErrorCode::dimension_mismatch,
                "model has " + std::to_string(model.coefficients.size()) +
                    " coefficients but the data has " + std::to_string(data.p()) + " features");
}

void check_feasible(const ScoringSystem& model, const CoefficientLattice& lattice,
                    InterceptPolicy policy) {
  if (model.coefficients.size() != lattice.p())
    throw Error(ErrorCode::dimension_mismatch, "model and lattice disagree on P");
  for (std::size_t j = 0; j < lattice.p(); ++j)
    if (!lattice.contains(j, model.coefficients[j]))
      throw Error(ErrorCode::invalid_input, "coefficient " + std::to_string(model.coefficients[j]) +
                                                " of feature " + std::to_string(j) +
                                                " is not in the lattice");
  if (policy == InterceptPolicy::none && model.intercept != 0)
    throw Error(ErrorCode::invalid_input, "intercept must be 0 when the policy is none");
  if (model.intercept < -lattice.bound() || model.intercept > lattice.bound())
    throw Error(ErrorCode::invalid_input, "intercept outside [-Lambda, Lambda]");
}

int predict(const ScoringSystem& model, std::span<const double> x) {
  if (x.size() != model.coefficients.size())
    throw Error(ErrorCode::dimension_mismatch,
                "input has " + std::to_string(x.size()) + " values, model expects " +
                    std::to_string(model.coefficients.size()));
  for (double v : x)
    if (!std::isfinite(v)) throw Error(ErrorCode::invalid_input, "non-finite input value");
  return model.score(x) > 0 ? 1 : -1;
}

std::vector<int> predict(const ScoringSystem& model, const Dataset& data) {
  check_compatible(data, model);
  std::vector<int> out(data.n());
  for (std::size_t i = 0; i < data.n(); ++i) out[i] = model.score(data.row(i)) > 0 ? 1 : -1;
  return out;
}

std::int64_t misclassified(const Dataset& data, const ScoringSystem& model) {
  check_compatible(data, model);
  std::int64_t errors = 0;
  for (std::size_t i = 0; i < data.n(); ++i)
    if (data.y(i) * model.score(data.row(i)) <= 0) ++errors;
  return errors;
}

double zero_one_loss(const Dataset& data, const ScoringSystem& model) {
  return static_cast<double>(misclassified(data, model)) / static_cast<double>(data.n());
}

std::int64_t penalty_nanos(const ScoringSystem& model, const SlimConfig& cfg) {
  std::int64_t nnz = static_cast<std::int64_t>(model.model_size());
  std::int64_t l1 = model.l1_norm();
  if (cfg.intercept == InterceptPolicy::penalized && model.intercept != 0) {
    nnz += 1;
    l1 += model.intercept < 0 ? -model.intercept : model.intercept;
  }
  return cfg.c0.nanos() * nnz + cfg.c1.nanos() * l1;
}

ObjectiveValue objective(const Dataset& data, const ScoringSystem& model, const SlimConfig& cfg) {
  cfg.validate();
  if (cfg.intercept == InterceptPolicy::none && model.intercept != 0)
    throw Error(ErrorCode::invalid_config, "model has an intercept but the policy is none");
  std::int64_t errors = misclassified(data, model);
  return ObjectiveValue(errors, static_cast<std::int64_t>(data.n()), penalty_nanos(model, cfg));
}

double log_cardinality(const CoefficientLattice& lattice) {
  double s = 0;
  for (std::size_t j = 0; j < lattice.p(); ++j)
    s += std::log(static_cast<double>(lattice.values(j).size()));
  return s;
}

double log_cardinality_upper_bound(std::size_t p, Coefficient bound) {
  return static_cast<double>(p) * std::log(2.0 * static_cast<double>(bound) + 1.0);
}

GeneralizationBound generalization_bound(double r_emp, double log_k, std::int64_t n,
                                         double delta) {
  if (!(delta > 0 && delta < 1))
    throw Error(ErrorCode::invalid_input, "delta must lie in (0, 1)");
  if (!(r_emp >= 0 && r_emp <= 1))
    throw Error(ErrorCode::invalid_input, "empirical risk must lie in [0, 1]");
  if (!(log_k >= 0) || !std::isfinite(log_k))
    throw Error(ErrorCode::invalid_input, "log K must be finite and nonnegative");
  if (n < 1) throw Error(ErrorCode::invalid_input, "N must be positive");
  GeneralizationBound b;
  b.empirical_risk = r_emp;
  b.log_k = log_k;
  b.delta = delta;
  b.n = n;
  b.bound_value = r_emp + std::sqrt((log_k - std::log(delta)) / (2.0 * static_cast<double>(n)));
  return b;
}

}  // namespace slim
