#include "slim/mip.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace slim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFeasTol = 1e-9;

std::size_t add_var(MipInstance& m, std::string name, VarKind kind, double lo, double up) {
  m.variables.push_back(Variable{std::move(name), kind, lo, up});
  return m.variables.size() - 1;
}

Coefficient max_abs_value(std::span<const Coefficient> values) {
  return std::max(-values.front(), values.back());
}

bool is_integral(double v) { return std::abs(v - std::nearbyint(v)) <= kFeasTol; }

}  // namespace

std::optional<std::size_t> MipInstance::find_variable(std::string_view var_name) const {
  for (std::size_t k = 0; k < variables.size(); ++k)
    if (variables[k].name == var_name) return k;
  return std::nullopt;
}

double nominal_big_m(const Dataset& data, const CoefficientLattice& lattice) {
  return static_cast<double>(lattice.bound()) * data.max_abs_feature();
}

double max_abs_score(const Dataset& data, const CoefficientLattice& lattice,
                     InterceptPolicy policy) {
  if (lattice.p() != data.p()) throw Error(ErrorCode::dimension_mismatch, "lattice and data disagree on P");
  double worst = 0;
  for (std::size_t i = 0; i < data.n(); ++i) {
    double s = policy == InterceptPolicy::none ? 0.0 : static_cast<double>(lattice.bound());
    for (std::size_t j = 0; j < data.p(); ++j)
      s += static_cast<double>(max_abs_value(lattice.values(j))) * std::abs(data.x(i, j));
    worst = std::max(worst, s);
  }
  return worst;
}

double resolve_big_m(const Dataset& data, const CoefficientLattice& lattice, const SlimConfig& cfg) {
  double needed = max_abs_score(data, lattice, cfg.intercept) + cfg.epsilon;
  if (cfg.big_m) {
    if (*cfg.big_m < needed) {
      std::ostringstream msg;
      msg << "big-M " << *cfg.big_m << " is too small: feasible scores reach "
          << needed - cfg.epsilon << ", so big-M must be at least " << needed;
      throw Error(ErrorCode::invalid_config, msg.str());
    }
    return *cfg.big_m;
  }
  return std::max(nominal_big_m(data, lattice), needed);
}

MipInstance encode(const Dataset& data, const CoefficientLattice& lattice, const SlimConfig& cfg) {
  cfg.validate();
  if (lattice.p() != data.p()) throw Error(ErrorCode::dimension_mismatch, "lattice and data disagree on P");
  const std::size_t n = data.n();
  const std::size_t p = data.p();
  const double big_m = resolve_big_m(data, lattice, cfg);
  const double lam = static_cast<double>(lattice.bound());

  MipInstance m;
  m.name = "slim";
  SlimLayout layout;
  layout.n = n;
  layout.p = p;
  layout.big_m = big_m;
  layout.epsilon = cfg.epsilon;
  layout.labels.assign(data.labels().begin(), data.labels().end());
  layout.features.assign(data.features().begin(), data.features().end());

  layout.alpha = m.variables.size();
  for (std::size_t i = 0; i < n; ++i) add_var(m, "a" + std::to_string(i + 1), VarKind::binary, 0, 1);
  layout.beta = m.variables.size();
  for (std::size_t j = 0; j < p; ++j) add_var(m, "b" + std::to_string(j + 1), VarKind::binary, 0, 1);
  layout.gamma = m.variables.size();
  for (std::size_t j = 0; j < p; ++j)
    add_var(m, "g" + std::to_string(j + 1), VarKind::continuous, 0, kInf);
  layout.lambda = m.variables.size();
  for (std::size_t j = 0; j < p; ++j)
    add_var(m, "l" + std::to_string(j + 1), VarKind::integer, -lam, lam);
  if (cfg.intercept != InterceptPolicy::none)
    layout.intercept = add_var(m, "l0", VarKind::integer, -lam, lam);
  if (cfg.intercept == InterceptPolicy::penalized) {
    layout.intercept_beta = add_var(m, "b0", VarKind::binary, 0, 1);
    layout.intercept_gamma = add_var(m, "g0", VarKind::continuous, 0, kInf);
  }
  layout.core_variables = m.variables.size();

  // Loss rows: -M a_i + eps <= y_i x_i'lambda <= M (1 - a_i) + eps, split in two.
  for (std::size_t i = 0; i < n; ++i) {
    const double y = data.y(i);
    std::vector<std::pair<std::size_t, double>> terms;
    for (std::size_t j = 0; j < p; ++j)
      if (data.x(i, j) != 0.0) terms.emplace_back(layout.lambda + j, y * data.x(i, j));
    if (layout.intercept) terms.emplace_back(*layout.intercept, y);
    terms.emplace_back(layout.alpha + i, big_m);
    const std::string id = std::to_string(i + 1);
    m.constraints.push_back(Constraint{"lo" + id, terms, Sense::ge, cfg.epsilon});
    m.constraints.push_back(Constraint{"hi" + id, std::move(terms), Sense::le, big_m + cfg.epsilon});
  }
  auto linking_rows = [&](const std::string& id, std::size_t l, std::size_t b, std::size_t g) {
    m.constraints.push_back(Constraint{"sl" + id, {{l, 1.0}, {b, lam}}, Sense::ge, 0.0});
    m.constraints.push_back(Constraint{"su" + id, {{l, 1.0}, {b, -lam}}, Sense::le, 0.0});
    m.constraints.push_back(Constraint{"al" + id, {{l, 1.0}, {g, 1.0}}, Sense::ge, 0.0});
    m.constraints.push_back(Constraint{"au" + id, {{l, 1.0}, {g, -1.0}}, Sense::le, 0.0});
  };
  for (std::size_t j = 0; j < p; ++j)
    linking_rows(std::to_string(j + 1), layout.lambda + j, layout.beta + j, layout.gamma + j);
  if (layout.intercept_beta)
    linking_rows("0", *layout.intercept, *layout.intercept_beta, *layout.intercept_gamma);
  layout.core_constraints = m.constraints.size();

  // Restricted coordinates: one selector per admissible value plus a convexity row.
  for (std::size_t j = 0; j < p; ++j) {
    if (lattice.is_full_range(j)) continue;
    LatticeDomain dom;
    dom.feature = j;
    dom.lambda_var = layout.lambda + j;
    auto values = lattice.values(j);
    dom.values.assign(values.begin(), values.end());
    Constraint convexity{"cv" + std::to_string(j + 1), {}, Sense::eq, 1.0};
    Constraint link{"lk" + std::to_string(j + 1), {{dom.lambda_var, 1.0}}, Sense::eq, 0.0};
    for (std::size_t k = 0; k < values.size(); ++k) {
      std::size_t z = add_var(m, "z" + std::to_string(j + 1) + "_" + std::to_string(k + 1),
                              VarKind::binary, 0, 1);
      dom.selector_vars.push_back(z);
      convexity.terms.emplace_back(z, 1.0);
      if (values[k] != 0) link.terms.emplace_back(z, -static_cast<double>(values[k]));
    }
    m.constraints.push_back(std::move(convexity));
    m.constraints.push_back(std::move(link));
    m.lattice_domains.push_back(std::move(dom));
  }

  const Rational loss_weight(1, static_cast<__int128>(n));
  const Rational c0(cfg.c0.nanos(), Penalty::kScale);
  const Rational c1(cfg.c1.nanos(), Penalty::kScale);
  for (std::size_t i = 0; i < n; ++i)
    m.objective.push_back(ObjectiveTerm{layout.alpha + i, 1.0 / static_cast<double>(n), loss_weight});
  if (cfg.c0.nanos() != 0)
    for (std::size_t j = 0; j < p; ++j)
      m.objective.push_back(ObjectiveTerm{layout.beta + j, cfg.c0.value(), c0});
  if (cfg.c1.nanos() != 0)
    for (std::size_t j = 0; j < p; ++j)
      m.objective.push_back(ObjectiveTerm{layout.gamma + j, cfg.c1.value(), c1});
  if (layout.intercept_beta) {
    if (cfg.c0.nanos() != 0) m.objective.push_back(ObjectiveTerm{*layout.intercept_beta, cfg.c0.value(), c0});
    if (cfg.c1.nanos() != 0) m.objective.push_back(ObjectiveTerm{*layout.intercept_gamma, cfg.c1.value(), c1});
  }
  m.layout = std::move(layout);
  return m;
}

// ---------------------------------------------------------------------------

FeasibilityReport verify_assignment(const MipInstance& instance, const ValueMap& assignment) {
  std::vector<double> values(instance.variables.size());
  for (std::size_t k = 0; k < instance.variables.size(); ++k) {
    const auto& v = instance.variables[k];
    auto it = assignment.find(v.name);
    if (it == assignment.end())
      throw Error(ErrorCode::invalid_input, "assignment has no value for variable '" + v.name + "'");
    values[k] = it->second;
  }

  FeasibilityReport report;
  auto violate = [&](const std::string& name, double amount, std::string detail) {
    report.feasible = false;
    report.violations.push_back(Violation{name, amount, std::move(detail)});
  };

  for (std::size_t k = 0; k < instance.variables.size(); ++k) {
    const auto& v = instance.variables[k];
    double x = values[k];
    if (!std::isfinite(x)) {
      violate(v.name, kInf, "value is not finite");
      continue;
    }
    if (x < v.lower - kFeasTol) violate(v.name, v.lower - x, "below lower bound");
    if (x > v.upper + kFeasTol) violate(v.name, x - v.upper, "above upper bound");
    if (v.kind != VarKind::continuous && !is_integral(x))
      violate(v.name, std::abs(x - std::nearbyint(x)), "not integral");
  }

  for (const auto& row : instance.constraints) {
    double lhs = 0;
    for (auto [var, coef] : row.terms) lhs += coef * values[var];
    const double tol = kFeasTol * (1.0 + std::abs(row.rhs));
    double excess = 0;
    switch (row.sense) {
      case Sense::le: excess = lhs - row.rhs; break;
      case Sense::ge: excess = row.rhs - lhs; break;
      case Sense::eq: excess = std::abs(lhs - row.rhs); break;
    }
    if (excess > tol) {
      std::ostringstream detail;
      detail << "lhs " << lhs << (row.sense == Sense::le ? " > " : row.sense == Sense::ge ? " < " : " != ")
             << row.rhs;
      violate(row.name, excess, detail.str());
    }
  }

  bool exact_ok = true;
  Rational exact(0, 1);
  for (const auto& term : instance.objective) {
    double x = values[term.var];
    report.objective_value += term.coef * x;
    if (!term.exact || !std::isfinite(x) || !is_integral(x)) {
      exact_ok = false;
      continue;
    }
    auto xi = static_cast<__int128>(std::llround(x));
    exact = Rational(exact.num() * term.exact->den() + term.exact->num() * xi * exact.den(),
                     exact.den() * term.exact->den());
  }
  if (exact_ok) {
    report.exact_objective = exact;
    report.objective_value = exact.to_double();
  }

  if (instance.layout) {
    const auto& L = *instance.layout;
    std::vector<double> lambda(L.p);
    for (std::size_t j = 0; j < L.p; ++j) lambda[j] = std::nearbyint(values[L.lambda + j]);
    double intercept = L.intercept ? std::nearbyint(values[*L.intercept]) : 0.0;
    for (std::size_t i = 0; i < L.n; ++i) {
      double s = intercept;
      for (std::size_t j = 0; j < L.p; ++j)
        if (lambda[j] != 0) s += lambda[j] * L.features[i * L.p + j];
      double margin = L.labels[i] * s;
      double alpha = values[L.alpha + i];
      bool in_band = margin > 0 && margin <= L.epsilon;
      if (in_band) report.slack_zone.push_back(i);
      double indicator = margin <= 0 ? 1.0 : 0.0;
      if (!in_band && std::abs(alpha - indicator) > kFeasTol)
        report.indicator_mismatches.push_back("a" + std::to_string(i + 1) + " = " +
                                              std::to_string(alpha) + " but the margin is " +
                                              std::to_string(margin));
    }
    auto check_link = [&](const std::string& id, double lam, std::size_t b, std::size_t g) {
      if (lam != 0 && values[b] < 1.0 - kFeasTol)
        report.indicator_mismatches.push_back("b" + id + " < 1 while lambda is nonzero");
      if (values[g] < std::abs(lam) - kFeasTol)
        report.indicator_mismatches.push_back("g" + id + " < |lambda|");
    };
    for (std::size_t j = 0; j < L.p; ++j)
      check_link(std::to_string(j + 1), lambda[j], L.beta + j, L.gamma + j);
    if (L.intercept_beta) check_link("0", intercept, *L.intercept_beta, *L.intercept_gamma);
  }
  return report;
}

ValueMap induced_assignment(const MipInstance& instance, const ScoringSystem& model) {
  if (!instance.layout) throw Error(ErrorCode::invalid_input, "instance was not produced by encode()");
  const auto& L = *instance.layout;
  if (model.coefficients.size() != L.p) throw Error(ErrorCode::dimension_mismatch, "model and instance disagree on P");
  ValueMap out;
  auto set = [&](std::size_t var, double v) { out[instance.variables[var].name] = v; };
  for (std::size_t j = 0; j < L.p; ++j) {
    const auto c = static_cast<double>(model.coefficients[j]);
    set(L.lambda + j, c);
    set(L.beta + j, c != 0 ? 1.0 : 0.0);
    set(L.gamma + j, std::abs(c));
  }
  if (L.intercept) {
    const auto c = static_cast<double>(model.intercept);
    set(*L.intercept, c);
    if (L.intercept_beta) {
      set(*L.intercept_beta, c != 0 ? 1.0 : 0.0);
      set(*L.intercept_gamma, std::abs(c));
    }
  } else if (model.intercept != 0) {
    throw Error(ErrorCode::invalid_input, "model has an intercept but the instance does not");
  }
  for (std::size_t i = 0; i < L.n; ++i) {
    double s = static_cast<double>(L.intercept ? model.intercept : 0);
    for (std::size_t j = 0; j < L.p; ++j)
      if (model.coefficients[j] != 0) s += static_cast<double>(model.coefficients[j]) * L.features[i * L.p + j];
    set(L.alpha + i, L.labels[i] * s <= 0 ? 1.0 : 0.0);
  }
  for (const auto& dom : instance.lattice_domains) {
    auto it = std::find(dom.values.begin(), dom.values.end(), model.coefficients[dom.feature]);
    if (it == dom.values.end())
      throw Error(ErrorCode::invalid_input, "coefficient of feature " + std::to_string(dom.feature) +
                                                " is outside its lattice");
    for (std::size_t k = 0; k < dom.selector_vars.size(); ++k)
      set(dom.selector_vars[k], dom.values.begin() + static_cast<std::ptrdiff_t>(k) == it ? 1.0 : 0.0);
  }
  return out;
}

ScoringSystem model_from_assignment(const MipInstance& instance, const ValueMap& assignment,
                                    const std::vector<std::string>& feature_names) {
  if (!instance.layout) throw Error(ErrorCode::invalid_input, "instance was not produced by encode()");
  const auto& L = *instance.layout;
  if (feature_names.size() != L.p) throw Error(ErrorCode::dimension_mismatch, "feature names do not match P");
  auto value = [&](std::size_t var) {
    const auto& name = instance.variables[var].name;
    auto it = assignment.find(name);
    if (it == assignment.end())
      throw Error(ErrorCode::invalid_input, "assignment has no value for variable '" + name + "'");
    if (!is_integral(it->second))
      throw Error(ErrorCode::invalid_input, "variable '" + name + "' is not integral");
    return static_cast<Coefficient>(std::llround(it->second));
  };
  ScoringSystem model;
  model.feature_names = feature_names;
  for (std::size_t j = 0; j < L.p; ++j) model.coefficients.push_back(value(L.lambda + j));
  if (L.intercept) model.intercept = value(*L.intercept);
  return model;
}

ValueMap parse_value_map(std::string_view text) {
  ValueMap out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string name, value, extra;
    if (!(fields >> name)) continue;
    if (!(fields >> value) || (fields >> extra))
      throw Error(ErrorCode::parse_error, "value map line " + std::to_string(line_no) +
                                              ": expected 'name value'");
    try {
      std::size_t used = 0;
      double v = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
      out[name] = v;
    } catch (const std::exception&) {
      throw Error(ErrorCode::parse_error, "value map line " + std::to_string(line_no) +
                                              ": bad number '" + value + "'");
    }
  }
  return out;
}

}  // namespace slim
