#include "search_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace slim::detail {

Instance::Instance(const Dataset& data, const CoefficientLattice& lat, const SlimConfig& cfg)
    : n(data.n()), p(data.p()), lattice(&lat), policy(cfg.intercept), c0(cfg.c0.nanos()), c1(cfg.c1.nanos()) {
  cfg.validate();
  if (lat.p() != data.p())
    throw Error(ErrorCode::dimension_mismatch, "lattice has " + std::to_string(lat.p()) +
                                                   " coordinates but the data has " +
                                                   std::to_string(data.p()) + " features");
  y.assign(data.labels().begin(), data.labels().end());
  columns.assign(p, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < p; ++j) columns[j][i] = data.x(i, j);
  if (policy != InterceptPolicy::none) {
    intercept_lo = -lat.bound();
    intercept_hi = lat.bound();
  }
  // Keys must stay far from int64 overflow.
  long double worst = static_cast<long double>(n) * Penalty::kScale +
                      static_cast<long double>(n) *
                          (static_cast<long double>(c0) * (p + 1) +
                           static_cast<long double>(c1) * (p + 1) * static_cast<long double>(lat.bound()));
  if (worst > 4.0e18L)
    throw Error(ErrorCode::invalid_config, "penalties too large for this N, P and bound");
}

// ---------------------------------------------------------------------------

InterceptSweep::InterceptSweep(const Instance& inst)
    : inst_(inst), t_lo_(-inst.intercept_hi), t_hi_(-inst.intercept_lo) {
  const auto width = static_cast<std::size_t>(t_hi_ - t_lo_ + 1);
  if (width <= 4 * inst.n + 64) {
    pos_bins_.assign(width, 0);
    neg_bins_.assign(width, 0);
  }
}

std::int64_t InterceptSweep::intercept_penalty(Coefficient b, bool with_penalty) const {
  if (!with_penalty || inst_.policy != InterceptPolicy::penalized) return 0;
  return inst_.coefficient_penalty(b);
}

InterceptChoice InterceptSweep::best(std::span<const double> s_pos, std::span<const double> s_neg,
                                     bool with_penalty) {
  return pos_bins_.empty() ? best_sorted(s_pos, s_neg, with_penalty)
                           : best_binned(s_pos, s_neg, with_penalty);
}

InterceptChoice InterceptSweep::best_binned(std::span<const double> s_pos, std::span<const double> s_neg,
                                            bool with_penalty) {
  std::fill(pos_bins_.begin(), pos_bins_.end(), 0);
  std::fill(neg_bins_.begin(), neg_bins_.end(), 0);
  const double lo = static_cast<double>(t_lo_);
  const double hi = static_cast<double>(t_hi_);
  std::int64_t pos_count = 0;  // errors among positives at t = t_hi
  std::int64_t neg_count = 0;  // errors among negatives at t = t_hi
  for (std::size_t i = 0; i < inst_.n; ++i) {
    if (inst_.y[i] > 0) {
      // error at t iff s <= t iff ceil(s) <= t
      double v = s_pos[i];
      if (v > hi) continue;
      ++pos_count;
      if (v > lo) ++pos_bins_[static_cast<std::size_t>(static_cast<std::int64_t>(std::ceil(v)) - t_lo_)];
    } else {
      // error at t iff s >= t iff floor(s) >= t
      double v = s_neg[i];
      if (v < lo) continue;
      if (v >= hi) {
        ++neg_count;
        continue;
      }
      ++neg_bins_[static_cast<std::size_t>(static_cast<std::int64_t>(std::floor(v)) - t_lo_)];
    }
  }
  InterceptChoice best;
  best.key = std::numeric_limits<Key>::max();
  // Walk t downwards so the intercept (-t) increases; keep the first minimum.
  for (std::int64_t t = t_hi_;; --t) {
    const std::int64_t errors = pos_count + neg_count;
    const Coefficient b = -t;
    const Key k = inst_.key(errors, intercept_penalty(b, with_penalty));
    if (k < best.key) best = InterceptChoice{errors, b, k};
    if (t == t_lo_) break;
    pos_count -= pos_bins_[static_cast<std::size_t>(t - t_lo_)];
    neg_count += neg_bins_[static_cast<std::size_t>(t - 1 - t_lo_)];
  }
  return best;
}

InterceptChoice InterceptSweep::best_sorted(std::span<const double> s_pos, std::span<const double> s_neg,
                                            bool with_penalty) {
  pos_thresholds_.clear();
  neg_thresholds_.clear();
  candidates_.clear();
  const double lo = static_cast<double>(t_lo_);
  const double hi = static_cast<double>(t_hi_);
  auto clamp_t = [&](std::int64_t t) { return std::clamp(t, t_lo_, t_hi_); };
  for (std::size_t i = 0; i < inst_.n; ++i) {
    if (inst_.y[i] > 0) {
      double v = s_pos[i];
      std::int64_t c = v <= lo ? t_lo_ : v > hi ? t_hi_ + 1 : static_cast<std::int64_t>(std::ceil(v));
      pos_thresholds_.push_back(c);
    } else {
      double v = s_neg[i];
      std::int64_t f = v >= hi ? t_hi_ : v < lo ? t_lo_ - 1 : static_cast<std::int64_t>(std::floor(v));
      neg_thresholds_.push_back(f);
    }
  }
  std::sort(pos_thresholds_.begin(), pos_thresholds_.end());
  std::sort(neg_thresholds_.begin(), neg_thresholds_.end());
  candidates_.push_back(t_lo_);
  candidates_.push_back(t_hi_);
  candidates_.push_back(clamp_t(0));
  for (std::int64_t c : pos_thresholds_) {
    candidates_.push_back(clamp_t(c - 1));
    candidates_.push_back(clamp_t(c));
  }
  for (std::int64_t f : neg_thresholds_) {
    candidates_.push_back(clamp_t(f));
    candidates_.push_back(clamp_t(f + 1));
  }
  std::sort(candidates_.begin(), candidates_.end());
  candidates_.erase(std::unique(candidates_.begin(), candidates_.end()), candidates_.end());

  InterceptChoice best;
  best.key = std::numeric_limits<Key>::max();
  for (auto it = candidates_.rbegin(); it != candidates_.rend(); ++it) {
    const std::int64_t t = *it;
    auto pos_err = std::upper_bound(pos_thresholds_.begin(), pos_thresholds_.end(), t) - pos_thresholds_.begin();
    auto neg_err = neg_thresholds_.end() - std::lower_bound(neg_thresholds_.begin(), neg_thresholds_.end(), t);
    const std::int64_t errors = pos_err + neg_err;
    const Coefficient b = -t;
    const Key k = inst_.key(errors, intercept_penalty(b, with_penalty));
    if (k < best.key) best = InterceptChoice{errors, b, k};
  }
  return best;
}

// ---------------------------------------------------------------------------

std::vector<std::vector<std::uint32_t>> suffix_groupings(const Instance& inst,
                                                         std::span<const std::size_t> order) {
  std::vector<std::vector<std::uint32_t>> out(order.size() + 1);
  out[order.size()].assign(inst.n, 0);
  std::vector<std::size_t> idx(inst.n);
  for (std::size_t d = order.size(); d-- > 0;) {
    const auto& prev = out[d + 1];
    const auto& col = inst.columns[order[d]];
    for (std::size_t i = 0; i < inst.n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      if (prev[a] != prev[b]) return prev[a] < prev[b];
      if (col[a] != col[b]) return col[a] < col[b];
      return a < b;
    });
    auto& next = out[d];
    next.assign(inst.n, 0);
    std::uint32_t id = 0;
    for (std::size_t k = 0; k < inst.n; ++k) {
      if (k > 0 && (prev[idx[k]] != prev[idx[k - 1]] || col[idx[k]] != col[idx[k - 1]])) ++id;
      next[idx[k]] = id;
    }
  }
  return out;
}

GroupBound::GroupBound(const Instance& inst, std::span<const std::uint32_t> group) : inst_(inst) {
  std::vector<std::size_t> idx(inst.n);
  for (std::size_t i = 0; i < inst.n; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return group[a] != group[b] ? group[a] < group[b] : a < b;
  });
  // Keep only groups holding both labels; the rest contribute nothing.
  offsets_.push_back(0);
  for (std::size_t start = 0; start < inst.n;) {
    std::size_t end = start;
    bool pos = false, neg = false;
    while (end < inst.n && group[idx[end]] == group[idx[start]]) {
      (inst.y[idx[end]] > 0 ? pos : neg) = true;
      ++end;
    }
    if (pos && neg) {
      for (std::size_t k = start; k < end; ++k) members_.push_back(static_cast<std::uint32_t>(idx[k]));
      offsets_.push_back(static_cast<std::uint32_t>(members_.size()));
    }
    start = end;
  }
}

std::int64_t GroupBound::lower_bound(std::span<const double> s,
                                     std::vector<std::pair<double, int>>& scratch_) const {
  std::int64_t total = 0;
  for (std::size_t g = 0; g + 1 < offsets_.size(); ++g) {
    scratch_.clear();
    std::int64_t negatives = 0;
    for (std::uint32_t k = offsets_[g]; k < offsets_[g + 1]; ++k) {
      const std::uint32_t i = members_[k];
      scratch_.emplace_back(s[i], inst_.y[i]);
      if (inst_.y[i] < 0) ++negatives;
    }
    std::sort(scratch_.begin(), scratch_.end());
    // Threshold t: positives with s <= t and negatives with s >= t are wrong.
    std::int64_t best = negatives;
    std::int64_t pos_le = 0;
    std::int64_t neg_lt = 0;
    for (std::size_t a = 0; a < scratch_.size();) {
      std::size_t b = a;
      std::int64_t pos_eq = 0, neg_eq = 0;
      while (b < scratch_.size() && scratch_[b].first == scratch_[a].first) {
        (scratch_[b].second > 0 ? pos_eq : neg_eq) += 1;
        ++b;
      }
      best = std::min(best, pos_le + pos_eq + negatives - neg_lt);
      best = std::min(best, pos_le + pos_eq + negatives - neg_lt - neg_eq);
      pos_le += pos_eq;
      neg_lt += neg_eq;
      a = b;
    }
    total += best;
  }
  return total;
}

// ---------------------------------------------------------------------------

bool Candidate::better_than(const Candidate& other) const {
  if (key != other.key) return key < other.key;
  if (coefficients != other.coefficients)
    return std::lexicographical_compare(coefficients.begin(), coefficients.end(),
                                        other.coefficients.begin(), other.coefficients.end());
  return intercept < other.intercept;
}

Candidate evaluate(const Instance& inst, InterceptSweep& sweep, std::span<const Coefficient> lambda,
                   std::vector<double>& scratch) {
  scratch.assign(inst.n, 0.0);
  std::int64_t pen = 0;
  for (std::size_t j = 0; j < inst.p; ++j) {
    if (lambda[j] == 0) continue;
    pen += inst.coefficient_penalty(lambda[j]);
    const double v = static_cast<double>(lambda[j]);
    const auto& col = inst.columns[j];
    for (std::size_t i = 0; i < inst.n; ++i) scratch[i] += v * col[i];
  }
  InterceptChoice c = sweep.best(scratch);
  return Candidate{c.key + static_cast<Key>(inst.n) * pen,
                   std::vector<Coefficient>(lambda.begin(), lambda.end()), c.intercept};
}

}  // namespace slim::detail
