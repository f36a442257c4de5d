#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "solspec/error.hpp"

namespace solspec {

inline constexpr std::size_t kMaxIntervalParts = 64;

/// Finite union of disjoint half-open intervals [lo, hi), kept sorted.
/// Endpoints may be +-infinity; [-inf, +inf) is the whole line.
class IntervalSet {
 public:
  IntervalSet() = default;

  static IntervalSet empty_set() { return IntervalSet(); }

  static IntervalSet reals() {
    IntervalSet s;
    s.parts_.emplace_back(-std::numeric_limits<double>::infinity(),
                          std::numeric_limits<double>::infinity());
    return s;
  }

  /// Validated entry point: at most kMaxIntervalParts pieces, no NaN, each
  /// lo < hi.  Overlapping or touching pieces are merged.
  static IntervalSet from_parts(std::vector<std::pair<double, double>> raw) {
    if (raw.size() > kMaxIntervalParts)
      throw Error("interval set has " + std::to_string(raw.size()) +
                  " parts, more than " + std::to_string(kMaxIntervalParts));
    for (const auto& [lo, hi] : raw) {
      if (std::isnan(lo) || std::isnan(hi))
        throw Error("interval endpoint is NaN");
      if (!(lo < hi))
        throw Error("malformed interval [" + std::to_string(lo) + ", " +
                    std::to_string(hi) + ")");
    }
    IntervalSet s;
    s.parts_ = std::move(raw);
    s.normalize();
    return s;
  }

  static IntervalSet half_open(double lo, double hi) {
    return from_parts({{lo, hi}});
  }

  const std::vector<std::pair<double, double>>& parts() const {
    return parts_;
  }

  bool is_empty() const { return parts_.empty(); }

  bool contains(double x) const {
    auto it = std::upper_bound(
        parts_.begin(), parts_.end(), x,
        [](double v, const std::pair<double, double>& p) { return v < p.first; });
    if (it == parts_.begin()) return false;
    --it;
    return x >= it->first && x < it->second;
  }

  IntervalSet intersect(const IntervalSet& o) const {
    IntervalSet out;
    std::size_t a = 0, b = 0;
    while (a < parts_.size() && b < o.parts_.size()) {
      double lo = std::max(parts_[a].first, o.parts_[b].first);
      double hi = std::min(parts_[a].second, o.parts_[b].second);
      if (lo < hi) out.parts_.emplace_back(lo, hi);
      if (parts_[a].second < o.parts_[b].second)
        ++a;
      else
        ++b;
    }
    return out;
  }

  IntervalSet unite(const IntervalSet& o) const {
    IntervalSet out;
    out.parts_ = parts_;
    out.parts_.insert(out.parts_.end(), o.parts_.begin(), o.parts_.end());
    out.normalize();
    return out;
  }

  std::string to_string() const {
    if (parts_.empty()) return "{}";
    std::string s;
    for (const auto& [lo, hi] : parts_) {
      if (!s.empty()) s += " u ";
      s += "[" + std::to_string(lo) + "," + std::to_string(hi) + ")";
    }
    return s;
  }

 private:
  void normalize() {
    std::sort(parts_.begin(), parts_.end());
    std::vector<std::pair<double, double>> merged;
    for (const auto& p : parts_) {
      if (!merged.empty() && p.first <= merged.back().second)
        merged.back().second = std::max(merged.back().second, p.second);
      else
        merged.push_back(p);
    }
    parts_ = std::move(merged);
  }

  std::vector<std::pair<double, double>> parts_;
};

/// Cut positions that stay clear of every value in `points`: midpoints of
/// consecutive gaps wider than min_gap, plus one cut below and one above.
inline std::vector<double> safe_cut_positions(std::vector<double> points,
                                              double min_gap) {
  std::sort(points.begin(), points.end());
  std::vector<double> cuts;
  if (points.empty()) {
    cuts.push_back(0.0);
    return cuts;
  }
  cuts.push_back(points.front() - 1.0);
  for (std::size_t t = 0; t + 1 < points.size(); ++t)
    if (points[t + 1] - points[t] > min_gap)
      cuts.push_back(0.5 * (points[t] + points[t + 1]));
  cuts.push_back(points.back() + 1.0);
  return cuts;
}

/// Random interval set whose endpoints are drawn from `cuts` (so they never
/// split an eigenvalue cluster); occasionally extends an end to infinity.
inline IntervalSet random_snapped_set(std::mt19937_64& rng,
                                      const std::vector<double>& cuts,
                                      std::size_t max_parts = 6) {
  if (cuts.size() < 2) {
    return std::uniform_int_distribution<int>(0, 1)(rng)
               ? IntervalSet::reals()
               : IntervalSet::empty_set();
  }
  std::vector<double> pool = cuts;
  std::shuffle(pool.begin(), pool.end(), rng);
  std::size_t want_parts = std::uniform_int_distribution<std::size_t>(
      1, std::min(max_parts, pool.size() / 2))(rng);
  std::vector<double> chosen(pool.begin(), pool.begin() + 2 * want_parts);
  std::sort(chosen.begin(), chosen.end());
  std::vector<std::pair<double, double>> parts;
  for (std::size_t p = 0; p < want_parts; ++p)
    parts.emplace_back(chosen[2 * p], chosen[2 * p + 1]);
  if (std::uniform_int_distribution<int>(0, 9)(rng) == 0)
    parts.front().first = -std::numeric_limits<double>::infinity();
  if (std::uniform_int_distribution<int>(0, 9)(rng) == 0)
    parts.back().second = std::numeric_limits<double>::infinity();
  return IntervalSet::from_parts(std::move(parts));
}

}  // namespace solspec
