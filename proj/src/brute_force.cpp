#include <algorithm>
#include <chrono>
#include <limits>

#include "slim/solver.hpp"

namespace slim {

SolveReport brute_force(const Dataset& data, const CoefficientLattice& lattice, const SlimConfig& cfg,
                        std::uint64_t cap) {
  const auto start = std::chrono::steady_clock::now();
  cfg.validate();
  if (lattice.p() != data.p())
    throw Error(ErrorCode::dimension_mismatch, "lattice and data disagree on the number of features");

  const Coefficient b_lo = cfg.intercept == InterceptPolicy::none ? 0 : -lattice.bound();
  const Coefficient b_hi = cfg.intercept == InterceptPolicy::none ? 0 : lattice.bound();
  unsigned __int128 count = static_cast<unsigned __int128>(b_hi - b_lo + 1);
  for (std::size_t j = 0; j < lattice.p(); ++j) {
    count *= lattice.values(j).size();
    if (count > std::numeric_limits<std::uint64_t>::max()) break;
  }
  if (count > cap) {
    const std::string size = count > std::numeric_limits<std::uint64_t>::max()
                                 ? "more than 2^64"
                                 : std::to_string(static_cast<std::uint64_t>(count));
    throw Error(ErrorCode::cap_exceeded,
                size + " candidate models exceed the cap of " + std::to_string(cap));
  }

  // Odometer over sorted sets; feature 0 is the most significant digit.
  const std::size_t p = lattice.p();
  std::vector<std::vector<Coefficient>> sets(p);
  for (std::size_t j = 0; j < p; ++j) {
    auto v = lattice.values(j);
    sets[j].assign(v.begin(), v.end());
    std::sort(sets[j].begin(), sets[j].end());
  }
  std::vector<std::size_t> digit(p, 0);
  ScoringSystem m;
  m.coefficients.assign(p, 0);
  m.feature_names = data.feature_names();
  m.lattice_id = lattice.id();

  SolveReport report;
  bool have = false;
  std::uint64_t evaluated = 0;
  for (;;) {
    for (std::size_t j = 0; j < p; ++j) m.coefficients[j] = sets[j][digit[j]];
    for (Coefficient b = b_lo; b <= b_hi; ++b) {
      m.intercept = b;
      const ObjectiveValue v = objective(data, m, cfg);
      ++evaluated;
      if (!have || v < report.objective_value) {
        report.incumbent = m;
        report.objective_value = v;
        have = true;
      }
    }
    std::size_t j = p;
    while (j > 0 && ++digit[j - 1] == sets[j - 1].size()) digit[--j] = 0;
    if (j == 0) break;
  }
  report.best_lower_bound = report.objective_value;
  report.gap = 0;
  report.nodes_expanded = evaluated;
  report.status = SolveStatus::optimal;
  report.elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - start);
  return report;
}

}  // namespace slim
