#ifndef SLIM_TESTS_SUPPORT_HPP
#define SLIM_TESTS_SUPPORT_HPP

// Random instance generators and brute-force oracles written from the
// objective's definition, sharing no code with the library's search.

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "slim/model.hpp"

namespace testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  std::int64_t integer(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(rng_() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  double unit() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
  bool chance(double p) { return unit() < p; }
  std::uint64_t bits() { return rng_(); }

 private:
  std::mt19937_64 rng_;
};

inline std::vector<std::string> names(std::size_t p) {
  std::vector<std::string> out;
  for (std::size_t j = 0; j < p; ++j) out.push_back("f" + std::to_string(j + 1));
  return out;
}

/// Integer features in [xlo, xhi]; labels from a hidden integer rule with
/// `noise` probability of a flip.
inline slim::Dataset random_dataset(Gen& g, std::size_t n, std::size_t p, int xlo, int xhi, double noise = 0.15) {
  std::vector<std::int64_t> hidden(p);
  for (auto& h : hidden) h = g.integer(-2, 2);
  const std::int64_t offset = g.integer(-2, 2);
  std::vector<double> x(n * p);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::int64_t s = offset;
    for (std::size_t j = 0; j < p; ++j) {
      const std::int64_t v = g.integer(xlo, xhi);
      x[i * p + j] = static_cast<double>(v);
      s += hidden[j] * v;
    }
    int label = s > 0 ? 1 : -1;
    if (g.chance(noise)) label = -label;
    y[i] = label;
  }
  return slim::Dataset(std::move(x), n, p, std::move(y), names(p));
}

/// Uniform on {0, 1e-9, ..., max} in penalty units.
inline slim::Penalty random_penalty(Gen& g, std::int64_t max_nanos) {
  return slim::Penalty::from_nanos(g.integer(0, max_nanos));
}

inline slim::ScoringSystem random_model(Gen& g, const slim::CoefficientLattice& lattice,
                                        slim::InterceptPolicy policy, double density = 0.6) {
  slim::ScoringSystem m;
  m.feature_names = names(lattice.p());
  m.lattice_id = lattice.id();
  for (std::size_t j = 0; j < lattice.p(); ++j) {
    auto set = lattice.values(j);
    m.coefficients.push_back(g.chance(density) ? set[static_cast<std::size_t>(g.integer(0, static_cast<std::int64_t>(set.size()) - 1))] : 0);
  }
  if (policy != slim::InterceptPolicy::none) m.intercept = g.integer(-lattice.bound(), lattice.bound());
  return m;
}

/// Objective for integer data in exact integer arithmetic:
/// errors / N + (c0 * nnz + c1 * l1) with c0, c1 in nanos.
inline slim::Rational exact_objective(const slim::Dataset& data, const std::vector<std::int64_t>& lambda,
                                      std::int64_t intercept, std::int64_t c0_nanos, std::int64_t c1_nanos,
                                      slim::InterceptPolicy policy) {
  std::int64_t errors = 0;
  for (std::size_t i = 0; i < data.n(); ++i) {
    std::int64_t s = intercept;
    for (std::size_t j = 0; j < data.p(); ++j) s += lambda[j] * static_cast<std::int64_t>(data.x(i, j));
    if (data.y(i) * s <= 0) ++errors;
  }
  std::int64_t nnz = 0, l1 = 0;
  for (auto v : lambda) {
    nnz += v != 0;
    l1 += v < 0 ? -v : v;
  }
  if (policy == slim::InterceptPolicy::penalized && intercept != 0) {
    nnz += 1;
    l1 += intercept < 0 ? -intercept : intercept;
  }
  const __int128 n = static_cast<__int128>(data.n());
  const __int128 scale = 1'000'000'000;
  return slim::Rational(errors * scale + n * (c0_nanos * nnz + c1_nanos * l1), n * scale);
}

struct Argmin {
  std::vector<std::int64_t> lambda;
  std::int64_t intercept = 0;
  slim::Rational value;
};

/// Every (lambda, intercept) in lexicographic order; the first strict minimum
/// is the lexicographically smallest optimum.
inline Argmin enumerate_optimum(const slim::Dataset& data, const std::vector<std::vector<std::int64_t>>& sets,
                                std::int64_t intercept_bound, std::int64_t c0_nanos, std::int64_t c1_nanos,
                                slim::InterceptPolicy policy) {
  const std::size_t p = sets.size();
  std::optional<Argmin> best;
  std::vector<std::int64_t> lambda(p, 0);
  const std::int64_t b_lo = policy == slim::InterceptPolicy::none ? 0 : -intercept_bound;
  const std::int64_t b_hi = policy == slim::InterceptPolicy::none ? 0 : intercept_bound;
  std::function<void(std::size_t)> rec = [&](std::size_t j) {
    if (j == p) {
      for (std::int64_t b = b_lo; b <= b_hi; ++b) {
        const slim::Rational v = exact_objective(data, lambda, b, c0_nanos, c1_nanos, policy);
        if (!best || v < best->value) best = Argmin{lambda, b, v};
      }
      return;
    }
    for (std::int64_t v : sets[j]) {
      lambda[j] = v;
      rec(j + 1);
    }
  };
  rec(0);
  return *best;
}

}  // namespace testing

#endif  // SLIM_TESTS_SUPPORT_HPP
