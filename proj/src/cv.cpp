#include "slim/cv.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <random>
#include <set>
#include <sstream>
#include <thread>

namespace slim {
namespace {

// Fisher-Yates with a plain modulus so the permutation is identical across
// standard libraries.
void shuffle(std::vector<std::size_t>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng() % i]);
}

std::vector<std::size_t> complement(std::size_t n, const std::vector<std::size_t>& fold) {
  std::vector<std::size_t> out;
  out.reserve(n - fold.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (k < fold.size() && fold[k] == i) {
      ++k;
      continue;
    }
    out.push_back(i);
  }
  return out;
}

std::chrono::milliseconds share(std::chrono::milliseconds total, std::size_t parts) {
  return std::max(std::chrono::milliseconds(1), total / static_cast<std::int64_t>(std::max<std::size_t>(parts, 1)));
}

template <typename Fn>
void for_each_fold(std::size_t k, unsigned parallel, Fn&& fn) {
  const unsigned workers = std::max(1u, std::min<unsigned>(parallel, static_cast<unsigned>(k)));
  if (workers == 1) {
    for (std::size_t f = 0; f < k; ++f) fn(f);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(k);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t f; (f = next.fetch_add(1)) < k;) {
        try {
          fn(f);
        } catch (...) {
          errors[f] = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

SolveReport train_fold(const Trainer& trainer, std::size_t fold, const Dataset& train,
                       const CoefficientLattice& lattice, const SlimConfig& cfg) {
  try {
    return trainer ? trainer(train, lattice, cfg) : solve(train, lattice, cfg);
  } catch (const Error& e) {
    throw Error(e.code(), "fold " + std::to_string(fold) + ": " + e.what());
  }
}

CvResult summarize(std::vector<FoldResult> folds) {
  CvResult r;
  r.per_fold = std::move(folds);
  std::vector<double> sizes;
  double total = 0;
  for (const auto& f : r.per_fold) {
    total += f.test_error;
    sizes.push_back(static_cast<double>(f.model_size));
  }
  r.mean_test_error = total / static_cast<double>(r.per_fold.size());
  r.median_model_size = median(sizes);
  return r;
}

FoldResult score_fold(std::size_t fold, const SolveReport& rep, const Dataset& train, const Dataset& test,
                      const SlimConfig& cfg) {
  FoldResult f;
  f.fold = fold;
  f.model = rep.incumbent;
  f.test_error = zero_one_loss(test, rep.incumbent);
  f.train_error = zero_one_loss(train, rep.incumbent);
  f.model_size = rep.incumbent.model_size();
  f.gap = rep.gap;
  f.elapsed = rep.elapsed;
  f.status = rep.status;
  f.c0 = cfg.c0;
  f.c1 = cfg.c1;
  return f;
}

}  // namespace

double median(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorCode::invalid_input, "median of an empty list");
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size() / 2;
  return values.size() % 2 ? values[m] : (values[m - 1] + values[m]) / 2;
}

std::vector<std::vector<std::size_t>> make_folds(const Dataset& data, const CvPlan& plan) {
  const std::size_t n = data.n();
  if (plan.k < 2) throw Error(ErrorCode::invalid_config, "fold count must be at least 2");
  if (plan.k > n)
    throw Error(ErrorCode::invalid_config, "fold count " + std::to_string(plan.k) + " exceeds N = " +
                                               std::to_string(n));
  std::mt19937_64 rng(plan.seed);
  std::vector<std::vector<std::size_t>> folds(plan.k);
  std::size_t dealt = 0;
  auto deal = [&](std::vector<std::size_t> idx) {
    shuffle(idx, rng);
    for (std::size_t i : idx) folds[dealt++ % plan.k].push_back(i);
  };
  if (plan.stratified) {
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < n; ++i) (data.y(i) > 0 ? pos : neg).push_back(i);
    deal(std::move(pos));
    deal(std::move(neg));
  } else {
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    deal(std::move(all));
  }
  const std::size_t positives = data.positives();
  for (std::size_t f = 0; f < plan.k; ++f) {
    std::sort(folds[f].begin(), folds[f].end());
    std::size_t fold_pos = 0;
    for (std::size_t i : folds[f]) fold_pos += data.y(i) > 0;
    const std::size_t fold_neg = folds[f].size() - fold_pos;
    if (positives - fold_pos == 0 || (n - positives) - fold_neg == 0)
      throw Error(ErrorCode::invalid_input,
                  "fold " + std::to_string(f) + " leaves a class absent from its training side");
  }
  return folds;
}

CvResult cross_validate(const Dataset& data, const CoefficientLattice& lattice, const SlimConfig& cfg,
                        const CvPlan& plan, const Trainer& trainer) {
  cfg.validate();
  const auto folds = make_folds(data, plan);
  SlimConfig fold_cfg = cfg;
  fold_cfg.time_limit = share(cfg.time_limit, plan.k);
  std::vector<FoldResult> results(plan.k);
  for_each_fold(plan.k, plan.parallel_folds, [&](std::size_t f) {
    const Dataset train = data.subset(complement(data.n(), folds[f]));
    const Dataset test = data.subset(folds[f]);
    const SolveReport rep = train_fold(trainer, f, train, lattice, fold_cfg);
    results[f] = score_fold(f, rep, train, test, fold_cfg);
  });
  return summarize(std::move(results));
}

CvResult cross_validate_selected(const Dataset& data, const CoefficientLattice& lattice,
                                 const SlimConfig& cfg, const CvPlan& plan, const PenaltyGrid& grid,
                                 const Trainer& trainer) {
  cfg.validate();
  if (grid.c0.empty() || grid.c1.empty())
    throw Error(ErrorCode::invalid_config, "penalty grid needs at least one c0 and one c1");
  const auto folds = make_folds(data, plan);
  const std::size_t points = grid.c0.size() * grid.c1.size();
  const auto outer_budget = share(cfg.time_limit, plan.k);
  const auto part = share(outer_budget, points + 1);
  CvPlan inner_plan = plan;
  inner_plan.parallel_folds = 1;

  std::vector<FoldResult> results(plan.k);
  for_each_fold(plan.k, plan.parallel_folds, [&](std::size_t f) {
    const Dataset train = data.subset(complement(data.n(), folds[f]));
    const Dataset test = data.subset(folds[f]);
    SlimConfig chosen = cfg;
    double best_error = 2.0;
    for (Penalty c0 : grid.c0)
      for (Penalty c1 : grid.c1) {
        SlimConfig trial = cfg;
        trial.c0 = c0;
        trial.c1 = c1;
        trial.time_limit = part;
        CvResult inner;
        try {
          inner = cross_validate(train, lattice, trial, inner_plan, trainer);
        } catch (const Error& e) {
          throw Error(e.code(), "fold " + std::to_string(f) + " (inner): " + e.what());
        }
        if (inner.mean_test_error < best_error) {
          best_error = inner.mean_test_error;
          chosen.c0 = c0;
          chosen.c1 = c1;
        }
      }
    chosen.time_limit = part;
    const SolveReport rep = train_fold(trainer, f, train, lattice, chosen);
    results[f] = score_fold(f, rep, train, test, chosen);
  });
  return summarize(std::move(results));
}

ResultTable report_table(const std::vector<std::pair<std::string, CvResult>>& results) {
  if (results.empty()) throw Error(ErrorCode::invalid_input, "no results to report");
  std::set<std::string> names;
  for (const auto& [name, r] : results) {
    if (!names.insert(name).second)
      throw Error(ErrorCode::invalid_input, "duplicate dataset name \"" + name + "\"");
    if (r.per_fold.empty()) throw Error(ErrorCode::invalid_input, "result \"" + name + "\" has no folds");
  }
  auto percent = [](double e) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f%%", 100.0 * e);
    return std::string(buf);
  };
  auto size_text = [](double s) {
    char buf[32];
    if (s == std::floor(s))
      std::snprintf(buf, sizeof buf, "%.0f", s);
    else
      std::snprintf(buf, sizeof buf, "%.1f", s);
    return std::string(buf);
  };
  std::size_t width = 7;
  for (const auto& [name, r] : results) width = std::max(width, name.size());

  std::ostringstream text, csv;
  auto row = [&](const std::string& a, const std::string& b, const std::string& c) {
    text << a << std::string(width + 2 - a.size(), ' ') << b << std::string(12 - b.size(), ' ') << c << '\n';
  };
  row("dataset", "metric", "SLIM");
  csv << "dataset,mean_test_error,median_model_size,folds\n";
  for (const auto& [name, r] : results) {
    row(name, "error", percent(r.mean_test_error));
    row("", "model size", size_text(r.median_model_size));
    char buf[64];
    std::snprintf(buf, sizeof buf, ",%.6f,%s,%zu\n", r.mean_test_error,
                  size_text(r.median_model_size).c_str(), r.per_fold.size());
    csv << name << buf;
  }
  return ResultTable{text.str(), csv.str()};
}

}  // namespace slim
