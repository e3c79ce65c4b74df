#include "slim/solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <thread>

#include "search_core.hpp"

namespace slim {

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::time_limit: return "time_limit";
    case SolveStatus::node_limit: return "node_limit";
  }
  return "unknown";
}

bool lexicographically_less(const ScoringSystem& a, const ScoringSystem& b) {
  if (a.coefficients != b.coefficients)
    return std::lexicographical_compare(a.coefficients.begin(), a.coefficients.end(),
                                        b.coefficients.begin(), b.coefficients.end());
  return a.intercept < b.intercept;
}

namespace {

using detail::Candidate;
using detail::Instance;
using detail::InterceptSweep;
using detail::Key;
using Clock = std::chrono::steady_clock;

// Tasks are run in rounds of this many, each round starting from the same
// incumbent, so the outcome does not depend on the thread count.
constexpr std::size_t kWave = 16;

// Search order and per-depth bound data. Depth d means positions [0, d) are
// decided and positions [d, p) are free.
struct Plan {
  explicit Plan(const Instance& inst);

  const Instance& inst;
  std::vector<std::size_t> order;        // position -> feature
  std::vector<std::size_t> position_of;  // feature -> position
  std::vector<std::vector<Coefficient>> values;  // nonzero values per position, by (|v|, v)
  std::vector<Coefficient> feature_min;          // min L_f per feature
  std::vector<std::int64_t> step;  // cheapest extra nonzero among positions >= d; -1 if none
  std::vector<std::vector<double>> free_hi;  // max completion score per example
  std::vector<std::vector<double>> free_lo;
  std::vector<detail::GroupBound> groups;
};

double correlation(std::span<const double> x, std::span<const int> y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0 || syy <= 0) return 0;
  return sxy / std::sqrt(sxx * syy);
}

Plan::Plan(const Instance& in) : inst(in) {
  const std::size_t p = inst.p, n = inst.n;
  std::vector<double> strength(p);
  for (std::size_t j = 0; j < p; ++j) strength[j] = std::fabs(correlation(inst.columns[j], inst.y));
  order.resize(p);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return strength[a] > strength[b]; });
  position_of.resize(p);
  for (std::size_t k = 0; k < p; ++k) position_of[order[k]] = k;

  feature_min.resize(p);
  values.resize(p);
  for (std::size_t j = 0; j < p; ++j) {
    auto set = inst.lattice->values(j);
    feature_min[j] = *std::min_element(set.begin(), set.end());
    auto& vals = values[position_of[j]];
    for (Coefficient v : set)
      if (v != 0) vals.push_back(v);
    std::sort(vals.begin(), vals.end(), [](Coefficient a, Coefficient b) {
      const Coefficient aa = a < 0 ? -a : a, bb = b < 0 ? -b : b;
      return aa != bb ? aa < bb : a < b;
    });
  }

  step.assign(p + 1, -1);
  for (std::size_t d = p; d-- > 0;) {
    std::int64_t here = values[d].empty() ? -1 : inst.coefficient_penalty(values[d].front());
    const std::int64_t later = step[d + 1];
    step[d] = here < 0 ? later : later < 0 ? here : std::min(here, later);
  }

  free_hi.assign(p + 1, std::vector<double>(n, 0.0));
  free_lo.assign(p + 1, std::vector<double>(n, 0.0));
  for (std::size_t d = p; d-- > 0;) {
    const auto& col = inst.columns[order[d]];
    auto set = inst.lattice->values(order[d]);
    const double vmax = static_cast<double>(*std::max_element(set.begin(), set.end()));
    const double vmin = static_cast<double>(feature_min[order[d]]);
    for (std::size_t i = 0; i < n; ++i) {
      const double a = vmax * col[i], b = vmin * col[i];
      free_hi[d][i] = free_hi[d + 1][i] + std::max(a, b);
      free_lo[d][i] = free_lo[d + 1][i] + std::min(a, b);
    }
  }

  auto grouping = detail::suffix_groupings(inst, order);
  groups.reserve(p + 1);
  for (std::size_t d = 0; d <= p; ++d) groups.emplace_back(inst, grouping[d]);
}

struct Task {
  std::vector<std::pair<std::size_t, Coefficient>> fixed;  // (position, value), positions increasing
  std::int64_t pen = 0;
  std::int64_t lb_errors = 0;
  Key lb_key = 0;
};

class Searcher {
 public:
  Searcher(const Plan& plan, const Clock::time_point deadline, std::atomic<bool>& stop)
      : plan_(plan),
        inst_(plan.inst),
        sweep_(plan.inst),
        deadline_(deadline),
        stop_(stop),
        s_(plan.inst.p + 1, std::vector<double>(plan.inst.n, 0.0)),
        assign_(plan.inst.p, 0),
        s_pos_(plan.inst.n),
        s_neg_(plan.inst.n) {}

  void set_incumbent(const Candidate& c) { best_ = c; }
  const Candidate& incumbent() const { return best_; }
  std::uint64_t nodes() const { return nodes_; }
  void reset_nodes() { nodes_ = 0; }

  // Explores everything with fewer than `split` nonzeros and records the
  // surviving nodes with exactly `split` nonzeros as tasks.
  bool generate(std::size_t split, std::vector<Task>& tasks) {
    split_ = split;
    tasks_ = &tasks;
    aborted_ = false;
    visit_leaf(s_[0], 0);
    if (inst_.p > 0 && plan_.step[0] >= 0) {
      const Key lb = static_cast<Key>(inst_.n) * plan_.step[0];
      if (!prune(lb, 0)) explore(0, 0, 0);
    }
    tasks_ = nullptr;
    split_ = std::numeric_limits<std::size_t>::max();
    return !aborted_;
  }

  // Returns false when stopped before the subtree was exhausted.
  bool run(const Task& t) {
    aborted_ = false;
    const std::size_t depth = t.fixed.back().first + 1;
    auto& s = s_[depth];
    std::fill(s.begin(), s.end(), 0.0);
    for (auto [pos, v] : t.fixed) {
      assign_[pos] = v;
      const auto& col = inst_.columns[plan_.order[pos]];
      const double dv = static_cast<double>(v);
      for (std::size_t i = 0; i < inst_.n; ++i) s[i] += dv * col[i];
    }
    if (!prune(t.lb_key, depth)) {
      visit_leaf(s, static_cast<Key>(inst_.n) * t.pen);
      if (depth < inst_.p && plan_.step[depth] >= 0 &&
          !prune(t.lb_key + static_cast<Key>(inst_.n) * plan_.step[depth], depth))
        explore(depth, t.pen, t.fixed.size());
    }
    for (auto [pos, v] : t.fixed) assign_[pos] = 0;
    return !aborted_;
  }

 private:
  void explore(std::size_t k, std::int64_t pen, std::size_t nonzeros) {
    const std::size_t p = inst_.p;
    const auto& s = s_[k];
    for (std::size_t j = k; j < p; ++j) {
      const auto& col = inst_.columns[plan_.order[j]];
      auto& sc = s_[j + 1];
      for (Coefficient v : plan_.values[j]) {
        if (expired()) return;
        const std::int64_t pen_c = pen + inst_.coefficient_penalty(v);
        const Key base = static_cast<Key>(inst_.n) * pen_c;
        if (base > best_.key) break;  // later values cost at least as much
        const double dv = static_cast<double>(v);
        for (std::size_t i = 0; i < inst_.n; ++i) sc[i] = s[i] + dv * col[i];
        assign_[j] = v;
        const std::int64_t lb_err = loss_bound(j + 1, sc, base);
        const Key lb = base + lb_err * Penalty::kScale;
        if (!prune(lb, j + 1)) {
          if (nonzeros + 1 == split_) {
            Task t;
            for (std::size_t q = 0; q <= j; ++q)
              if (assign_[q] != 0) t.fixed.emplace_back(q, assign_[q]);
            t.pen = pen_c;
            t.lb_errors = lb_err;
            t.lb_key = lb;
            tasks_->push_back(std::move(t));
          } else {
            visit_leaf(sc, base);
            if (j + 1 < p && plan_.step[j + 1] >= 0 &&
                !prune(lb + static_cast<Key>(inst_.n) * plan_.step[j + 1], j + 1))
              explore(j + 1, pen_c, nonzeros + 1);
          }
        }
        assign_[j] = 0;
      }
    }
  }

  std::int64_t loss_bound(std::size_t depth, std::span<const double> s, Key base) {
    const auto& hi = plan_.free_hi[depth];
    const auto& lo = plan_.free_lo[depth];
    for (std::size_t i = 0; i < inst_.n; ++i) {
      s_pos_[i] = s[i] + hi[i];
      s_neg_[i] = s[i] + lo[i];
    }
    const std::int64_t interval = sweep_.best(s_pos_, s_neg_, false).errors;
    if (base + interval * Penalty::kScale > best_.key) return interval;
    const auto& g = plan_.groups[depth];
    if (g.trivial()) return interval;
    return std::max(interval, g.lower_bound(s, group_scratch_));
  }

  // A subtree whose bound ties the incumbent can still hold a
  // lexicographically smaller optimum.
  bool prune(Key lb, std::size_t decided) const {
    if (lb > best_.key) return true;
    if (lb < best_.key) return false;
    for (std::size_t f = 0; f < inst_.p; ++f) {
      const std::size_t pos = plan_.position_of[f];
      const Coefficient lowest = pos < decided ? assign_[pos] : plan_.feature_min[f];
      const Coefficient held = best_.coefficients[f];
      if (lowest < held) return false;
      if (lowest > held) return true;
    }
    return true;
  }

  // Polls the clock every 64 child evaluations; each one costs a sweep over N.
  bool expired() {
    if (aborted_) return true;
    if ((++ticks_ & 63u) == 0 && (stop_.load(std::memory_order_relaxed) || Clock::now() >= deadline_)) {
      stop_.store(true, std::memory_order_relaxed);
      aborted_ = true;
    }
    return aborted_;
  }

  void visit_leaf(std::span<const double> s, Key base) {
    ++nodes_;
    const auto choice = sweep_.best(s);
    const Key key = choice.key + base;
    if (key > best_.key) return;
    Candidate c{key, std::vector<Coefficient>(inst_.p, 0), choice.intercept};
    for (std::size_t pos = 0; pos < inst_.p; ++pos) c.coefficients[plan_.order[pos]] = assign_[pos];
    if (c.better_than(best_)) best_ = std::move(c);
  }

  const Plan& plan_;
  const Instance& inst_;
  InterceptSweep sweep_;
  Clock::time_point deadline_;
  std::atomic<bool>& stop_;
  std::vector<std::vector<double>> s_;  // partial scores per depth
  std::vector<Coefficient> assign_;     // per position
  std::vector<double> s_pos_, s_neg_;
  std::vector<std::pair<double, int>> group_scratch_;
  Candidate best_;
  std::uint64_t nodes_ = 0;
  std::uint64_t ticks_ = 0;
  bool aborted_ = false;
  std::size_t split_ = std::numeric_limits<std::size_t>::max();
  std::vector<Task>* tasks_ = nullptr;
};

ScoringSystem to_model(const Dataset& data, const CoefficientLattice& lattice, const Candidate& c) {
  ScoringSystem m;
  m.coefficients = c.coefficients;
  m.intercept = c.intercept;
  m.feature_names = data.feature_names();
  m.lattice_id = lattice.id();
  return m;
}

Candidate from_model(const ScoringSystem& model, Key key) {
  return Candidate{key, model.coefficients, model.intercept};
}

std::chrono::milliseconds since(Clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start);
}

}  // namespace

SolveReport solve(const Dataset& data, const CoefficientLattice& lattice, const SlimConfig& cfg,
                  std::span<const ScoringSystem> warm_starts) {
  const auto start = Clock::now();
  const Instance inst(data, lattice, cfg);
  const auto deadline = start + cfg.time_limit;
  for (const auto& w : warm_starts) {
    check_compatible(data, w);
    check_feasible(w, lattice, cfg.intercept);
  }

  InterceptSweep sweep(inst);
  std::vector<double> scratch;
  auto key_of = [&](const ScoringSystem& m) {
    return inst.key(misclassified(data, m), penalty_nanos(m, cfg));
  };

  // Incumbent: zero model, warm starts (as given and with a re-fit intercept), local search.
  Candidate best = detail::evaluate(inst, sweep, std::vector<Coefficient>(inst.p, 0), scratch);
  auto offer = [&](Candidate c) {
    if (c.better_than(best)) best = std::move(c);
  };
  for (const auto& w : warm_starts) {
    offer(from_model(w, key_of(w)));
    offer(detail::evaluate(inst, sweep, w.coefficients, scratch));
  }
  {
    ScoringSystem ls = local_search_incumbent(data, lattice, cfg, cfg.seed);
    offer(detail::evaluate(inst, sweep, ls.coefficients, scratch));
  }

  SolveReport report;
  auto objective_of = [&](const Candidate& c) { return objective(data, to_model(data, lattice, c), cfg); };
  ObjectiveValue lower{0, static_cast<std::int64_t>(inst.n), 0};
  auto record = [&](std::uint64_t nodes) {
    report.trace.push_back(TracePoint{since(start), objective_of(best), lower, nodes});
  };
  record(0);

  const Plan plan(inst);
  std::atomic<bool> stop{Clock::now() >= deadline};
  const unsigned threads = std::max(1u, cfg.threads);
  std::vector<Searcher> workers;
  workers.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) workers.emplace_back(plan, deadline, stop);

  std::size_t branching = 0;
  for (const auto& v : plan.values) branching += v.size();
  const std::size_t split = (branching >= 256 || inst.p < 2) ? 1 : 2;

  std::vector<Task> tasks;
  std::uint64_t nodes = 0;
  SolveStatus status = SolveStatus::optimal;
  bool complete = true;
  {
    Searcher& gen = workers.front();
    gen.set_incumbent(best);
    complete = gen.generate(split, tasks);
    best = gen.incumbent();
    nodes += gen.nodes();
    gen.reset_nodes();
  }

  // Open-task lower bounds: suffix minima over the remaining task list.
  struct Bound {
    Key key;
    std::int64_t errors;
    std::int64_t pen;
  };
  auto bound_of = [](const Task& t) { return Bound{t.lb_key, t.lb_errors, t.pen}; };
  std::vector<Bound> suffix(tasks.size() + 1,
                            Bound{std::numeric_limits<Key>::max(), 0, 0});
  for (std::size_t k = tasks.size(); k-- > 0;) {
    const Bound b = bound_of(tasks[k]);
    suffix[k] = b.key < suffix[k + 1].key ? b : suffix[k + 1];
  }
  auto lower_from = [&](std::optional<Bound> open) {
    // min(incumbent, open bounds), never below the previous value.
    ObjectiveValue candidate = objective_of(best);
    if (open && open->key < best.key)
      candidate = ObjectiveValue(open->errors, static_cast<std::int64_t>(inst.n), open->pen);
    if (candidate > lower) lower = candidate;
  };

  if (!complete) {
    status = SolveStatus::time_limit;
    // Generation was cut short; only the trivial bound is known.
  }

  std::size_t next = 0;
  if (complete) {
    lower_from(tasks.empty() ? std::nullopt : std::optional<Bound>(suffix[0]));
    while (next < tasks.size()) {
      const std::size_t end = std::min(tasks.size(), next + kWave);
      const Candidate wave_start = best;
      std::vector<Candidate> found(end - next);
      std::vector<std::uint64_t> counted(end - next, 0);
      std::vector<char> finished(end - next, 0);
      std::atomic<std::size_t> cursor{next};
      auto work = [&](Searcher& s) {
        for (std::size_t k; (k = cursor.fetch_add(1)) < end;) {
          s.set_incumbent(wave_start);
          s.reset_nodes();
          finished[k - next] = s.run(tasks[k]) ? 1 : 0;
          found[k - next] = s.incumbent();
          counted[k - next] = s.nodes();
        }
      };
      const std::size_t used = std::min<std::size_t>(threads, end - next);
      if (used <= 1) {
        work(workers.front());
      } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 1; t < used; ++t) pool.emplace_back(work, std::ref(workers[t]));
        work(workers.front());
        for (auto& th : pool) th.join();
      }
      std::optional<Bound> open;
      for (std::size_t k = next; k < end; ++k) {
        offer(found[k - next]);
        nodes += counted[k - next];
        if (!finished[k - next]) {
          const Bound b = bound_of(tasks[k]);
          if (!open || b.key < open->key) open = b;
        }
      }
      next = end;
      if (suffix[next].key != std::numeric_limits<Key>::max() && (!open || suffix[next].key < open->key))
        open = suffix[next];
      lower_from(open);
      record(nodes);
      if (stop.load() || Clock::now() >= deadline) {
        if (next < tasks.size() || std::find(finished.begin(), finished.end(), 0) != finished.end())
          status = SolveStatus::time_limit;
        break;
      }
      if (cfg.node_limit != 0 && nodes >= cfg.node_limit && next < tasks.size()) {
        status = SolveStatus::node_limit;
        break;
      }
    }
  }

  report.incumbent = to_model(data, lattice, best);
  report.objective_value = objective(data, report.incumbent, cfg);
  if (status == SolveStatus::optimal) lower = report.objective_value;
  if (lower > report.objective_value) lower = report.objective_value;
  report.best_lower_bound = lower;
  report.gap = status == SolveStatus::optimal
                   ? 0.0
                   : std::max(0.0, report.objective_value.value() - lower.value());
  report.nodes_expanded = nodes;
  report.status = status;
  report.elapsed = since(start);
  if (report.trace.empty() || report.trace.back().lower_bound != lower ||
      report.trace.back().nodes != nodes)
    record(nodes);
  return report;
}

}  // namespace slim
