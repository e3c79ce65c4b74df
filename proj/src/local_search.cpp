#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "search_core.hpp"
#include "slim/solver.hpp"

namespace slim {
namespace {

using detail::Candidate;
using detail::Instance;
using detail::InterceptSweep;

struct LogisticFit {
  std::vector<double> weights;  // raw feature units
};

// L2-regularized logistic regression by gradient descent on standardized
// features; the step size comes from a power-iteration estimate of the
// curvature.
LogisticFit fit_logistic(const Instance& inst) {
  const std::size_t n = inst.n, p = inst.p;
  std::vector<double> mean(p, 0.0), scale(p, 0.0);
  for (std::size_t j = 0; j < p; ++j) {
    const auto& col = inst.columns[j];
    double m = std::accumulate(col.begin(), col.end(), 0.0) / static_cast<double>(n);
    double v = 0;
    for (double x : col) v += (x - m) * (x - m);
    mean[j] = m;
    scale[j] = std::sqrt(v / static_cast<double>(n));
  }
  auto z = [&](std::size_t j, std::size_t i) {
    return scale[j] > 0 ? (inst.columns[j][i] - mean[j]) / scale[j] : 0.0;
  };

  // Largest eigenvalue of [Z 1]^T [Z 1] / n.
  std::vector<double> u(p + 1, 1.0), t(n), next(p + 1);
  double eig = 1.0;
  for (int it = 0; it < 20; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      double acc = u[p];
      for (std::size_t j = 0; j < p; ++j) acc += z(j, i) * u[j];
      t[i] = acc;
    }
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < p; ++j) next[j] += z(j, i) * t[i];
      next[p] += t[i];
    }
    double norm = 0;
    for (double& x : next) {
      x /= static_cast<double>(n);
      norm += x * x;
    }
    norm = std::sqrt(norm);
    if (norm == 0) break;
    eig = norm;
    for (std::size_t k = 0; k <= p; ++k) u[k] = next[k] / norm;
  }
  constexpr double kRidge = 1e-3;
  const double lr = 1.0 / (0.25 * eig * 1.1 + kRidge);

  std::vector<double> w(p + 1, 0.0), grad(p + 1);
  for (int it = 0; it < 300; ++it) {
    std::fill(grad.begin(), grad.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double margin = w[p];
      for (std::size_t j = 0; j < p; ++j) margin += z(j, i) * w[j];
      margin *= inst.y[i];
      const double g = -inst.y[i] / (1.0 + std::exp(margin));
      for (std::size_t j = 0; j < p; ++j) grad[j] += g * z(j, i);
      grad[p] += g;
    }
    for (std::size_t k = 0; k <= p; ++k) {
      grad[k] /= static_cast<double>(n);
      if (k < p) grad[k] += kRidge * w[k];
      w[k] -= lr * grad[k];
    }
  }
  LogisticFit fit;
  fit.weights.resize(p);
  for (std::size_t j = 0; j < p; ++j) fit.weights[j] = scale[j] > 0 ? w[j] / scale[j] : 0.0;
  return fit;
}

Coefficient nearest(std::span<const Coefficient> set, double target) {
  Coefficient best = 0;
  double gap = std::fabs(target);
  for (Coefficient v : set) {
    const double d = std::fabs(target - static_cast<double>(v));
    const Coefficient av = v < 0 ? -v : v, ab = best < 0 ? -best : best;
    if (d < gap || (d == gap && (av < ab || (av == ab && v < best)))) {
      best = v;
      gap = d;
    }
  }
  return best;
}

Candidate descend(const Instance& inst, InterceptSweep& sweep, Candidate current, std::uint64_t seed) {
  const std::size_t n = inst.n, p = inst.p;
  std::vector<double> s(n, 0.0), trial(n);
  for (std::size_t j = 0; j < p; ++j) {
    const double v = static_cast<double>(current.coefficients[j]);
    if (v == 0) continue;
    for (std::size_t i = 0; i < n; ++i) s[i] += v * inst.columns[j][i];
  }
  std::int64_t pen = 0;
  for (Coefficient v : current.coefficients) pen += inst.coefficient_penalty(v);

  std::vector<std::size_t> visit(p);
  std::iota(visit.begin(), visit.end(), 0);
  std::mt19937_64 rng(seed);
  for (std::size_t k = p; k > 1; --k) std::swap(visit[k - 1], visit[rng() % k]);

  for (bool improved = true; improved;) {
    improved = false;
    for (std::size_t j : visit) {
      const Coefficient old = current.coefficients[j];
      const auto& col = inst.columns[j];
      const std::int64_t pen_rest = pen - inst.coefficient_penalty(old);
      Candidate best_move = current;
      for (Coefficient v : inst.lattice->values(j)) {
        if (v == old) continue;
        const std::int64_t pen_v = pen_rest + inst.coefficient_penalty(v);
        const detail::Key base = static_cast<detail::Key>(n) * pen_v;
        if (base >= best_move.key) continue;
        const double dv = static_cast<double>(v - old);
        for (std::size_t i = 0; i < n; ++i) trial[i] = s[i] + dv * col[i];
        const auto choice = sweep.best(trial);
        const detail::Key key = choice.key + base;
        if (key < best_move.key) {
          best_move.key = key;
          best_move.coefficients[j] = v;
          best_move.intercept = choice.intercept;
        }
      }
      if (best_move.key < current.key) {
        const double dv = static_cast<double>(best_move.coefficients[j] - old);
        for (std::size_t i = 0; i < n; ++i) s[i] += dv * col[i];
        pen = pen_rest + inst.coefficient_penalty(best_move.coefficients[j]);
        current = std::move(best_move);
        improved = true;
      }
    }
  }
  return current;
}

ScoringSystem to_model(const Dataset& data, const CoefficientLattice& lattice, const Candidate& c) {
  ScoringSystem m;
  m.coefficients = c.coefficients;
  m.intercept = c.intercept;
  m.feature_names = data.feature_names();
  m.lattice_id = lattice.id();
  return m;
}

}  // namespace

ScoringSystem local_search_incumbent(const Dataset& data, const CoefficientLattice& lattice,
                                     const SlimConfig& cfg, std::uint64_t seed) {
  const Instance inst(data, lattice, cfg);
  InterceptSweep sweep(inst);
  std::vector<double> scratch;

  Candidate best = detail::evaluate(inst, sweep, std::vector<Coefficient>(inst.p, 0), scratch);
  if (inst.p == 0 || inst.n == 0) return to_model(data, lattice, best);

  const LogisticFit fit = fit_logistic(inst);
  double wmax = 0;
  for (double w : fit.weights) wmax = std::max(wmax, std::fabs(w));
  if (wmax > 0) {
    // Round the fitted direction at several magnitudes.
    for (double target = static_cast<double>(lattice.bound()); target >= 0.5; target /= 2) {
      std::vector<Coefficient> lambda(inst.p);
      for (std::size_t j = 0; j < inst.p; ++j)
        lambda[j] = nearest(lattice.values(j), fit.weights[j] * target / wmax);
      Candidate c = detail::evaluate(inst, sweep, lambda, scratch);
      if (c.better_than(best)) best = std::move(c);
    }
  }
  Candidate from_fit = descend(inst, sweep, best, seed);
  Candidate from_zero = descend(
      inst, sweep, detail::evaluate(inst, sweep, std::vector<Coefficient>(inst.p, 0), scratch), seed);
  return to_model(data, lattice, from_zero.better_than(from_fit) ? from_zero : from_fit);
}

ScoringSystem improve_by_coordinate_moves(const Dataset& data, const CoefficientLattice& lattice,
                                          const SlimConfig& cfg, ScoringSystem start,
                                          std::uint64_t seed) {
  check_compatible(data, start);
  check_feasible(start, lattice, cfg.intercept);
  const Instance inst(data, lattice, cfg);
  InterceptSweep sweep(inst);
  std::vector<double> scratch;
  Candidate c = detail::evaluate(inst, sweep, start.coefficients, scratch);
  const Candidate given{inst.key(misclassified(data, start), penalty_nanos(start, cfg)), start.coefficients,
                        start.intercept};
  if (given.key < c.key) c = given;
  return to_model(data, lattice, descend(inst, sweep, std::move(c), seed));
}

}  // namespace slim
