// SPDX-License-Identifier: Apache-2.0
#include "attndse/pareto.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "attndse/rng.hpp"

namespace adse {
namespace {

using Points = std::vector<std::vector<double>>;

void check_dims(std::size_t a, std::size_t b, const char* what) {
  if (a != b)
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" + std::to_string(a) +
                                " vs " + std::to_string(b) + ")");
}

bool dominates_min(std::span<const double> a, std::span<const double> b) {
  bool strict = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > b[i]) return false;
    if (a[i] < b[i]) strict = true;
  }
  return strict;
}

// Non-dominated subset of minimization vectors with duplicates dropped.
Points nondominated_min(Points pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  Points out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < pts.size() && !dominated; ++j)
      dominated = j != i && dominates_min(pts[j], pts[i]);
    if (!dominated) out.push_back(pts[i]);
  }
  return out;
}

// Sweep line over non-dominated 2-D minimization points.
double hv2(Points pts, double r0, double r1) {
  std::sort(pts.begin(), pts.end());
  double area = 0.0;
  double best_y = r1;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double next_x = i + 1 < pts.size() ? pts[i + 1][0] : r0;
    best_y = std::min(best_y, pts[i][1]);
    area += (next_x - pts[i][0]) * (r1 - best_y);
  }
  return area;
}

// Slices along the last coordinate; each slab contributes the (d-1)-volume
// of the points below it.
double hv_rec(Points pts, std::span<const double> ref) {
  const std::size_t d = ref.size();
  if (pts.empty()) return 0.0;
  if (d == 1) {
    double best = ref[0];
    for (const auto& p : pts) best = std::min(best, p[0]);
    return ref[0] - best;
  }
  if (d == 2) return hv2(std::move(pts), ref[0], ref[1]);
  std::sort(pts.begin(), pts.end(), [d](const auto& a, const auto& b) { return a[d - 1] < b[d - 1]; });
  double volume = 0.0;
  Points prefix;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    prefix.emplace_back(pts[i].begin(), pts[i].end() - 1);
    const double top = i + 1 < pts.size() ? pts[i + 1][d - 1] : ref[d - 1];
    const double depth = top - pts[i][d - 1];
    if (depth <= 0.0) continue;
    volume += depth * hv_rec(nondominated_min(prefix), ref.first(d - 1));
  }
  return volume;
}

Points canonical(std::span<const std::vector<double>> points, const Orientation& orientation) {
  Points out;
  out.reserve(points.size());
  for (const auto& p : points) {
    check_dims(p.size(), orientation.size(), "hypervolume");
    out.push_back(to_minimization(p, orientation));
  }
  return out;
}

}  // namespace

Orientation orientation_for(std::span<const Objective> objectives) {
  Orientation o;
  for (Objective obj : objectives) o.push_back(is_maximized(obj) ? Sense::kMaximize : Sense::kMinimize);
  return o;
}

std::vector<double> project(const ObjectiveVector& v, std::span<const Objective> objectives) {
  std::vector<double> out;
  for (Objective obj : objectives) out.push_back(objective_value(v, obj));
  return out;
}

std::vector<double> to_minimization(std::span<const double> v, std::span<const Sense> orientation) {
  check_dims(v.size(), orientation.size(), "to_minimization");
  std::vector<double> out(v.begin(), v.end());
  for (std::size_t i = 0; i < out.size(); ++i)
    if (orientation[i] == Sense::kMaximize) out[i] = -out[i];
  return out;
}

bool dominates(std::span<const double> a, std::span<const double> b, std::span<const Sense> orientation) {
  check_dims(a.size(), b.size(), "dominates");
  check_dims(a.size(), orientation.size(), "dominates");
  bool strict = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const bool max = orientation[i] == Sense::kMaximize;
    const double x = max ? -a[i] : a[i];
    const double y = max ? -b[i] : b[i];
    if (x > y) return false;
    if (x < y) strict = true;
  }
  return strict;
}

bool objectives_equal(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > kObjectiveTolerance) return false;
  return true;
}

bool ParetoSet::would_expand(std::span<const double> objectives) const {
  for (const auto& m : members_)
    if (objectives_equal(m.objectives, objectives) || dominates(m.objectives, objectives, orientation_))
      return false;
  return true;
}

bool ParetoSet::insert(const DesignPoint& point, std::vector<double> objectives) {
  check_dims(objectives.size(), orientation_.size(), "ParetoSet::insert");
  for (auto& m : members_) {
    if (objectives_equal(m.objectives, objectives)) {
      if (point < m.point) {
        m.point = point;
        m.objectives = std::move(objectives);
        return true;
      }
      return false;
    }
    if (dominates(m.objectives, objectives, orientation_)) return false;
  }
  std::erase_if(members_, [&](const ParetoMember& m) { return dominates(objectives, m.objectives, orientation_); });
  members_.push_back({point, std::move(objectives)});
  return true;
}

bool ParetoSet::contains_point(const DesignPoint& point) const {
  return std::any_of(members_.begin(), members_.end(), [&](const auto& m) { return m.point == point; });
}

std::vector<ParetoMember> ParetoSet::sorted_members() const {
  auto out = members_;
  std::sort(out.begin(), out.end(), [](const ParetoMember& a, const ParetoMember& b) {
    return a.objectives != b.objectives ? a.objectives < b.objectives : a.point < b.point;
  });
  return out;
}

ParetoSet pareto_filter(std::span<const ParetoMember> points, const Orientation& orientation) {
  ParetoSet set(orientation);
  for (const auto& p : points) set.insert(p.point, p.objectives);
  return set;
}

std::vector<double> reference_point(std::span<const std::vector<double>> points,
                                    const Orientation& orientation, double margin) {
  if (points.empty()) throw std::invalid_argument("reference_point: no points");
  std::vector<double> ref(orientation.size());
  for (std::size_t j = 0; j < orientation.size(); ++j) {
    const bool max = orientation[j] == Sense::kMaximize;
    double worst = points[0][j];
    for (const auto& p : points) {
      check_dims(p.size(), orientation.size(), "reference_point");
      worst = max ? std::min(worst, p[j]) : std::max(worst, p[j]);
    }
    ref[j] = max ? worst - margin * std::abs(worst) : worst + margin * std::abs(worst);
  }
  return ref;
}

double hypervolume(std::span<const std::vector<double>> points, std::span<const double> ref,
                   const Orientation& orientation) {
  check_dims(ref.size(), orientation.size(), "hypervolume");
  for (const auto& p : points) {
    check_dims(p.size(), orientation.size(), "hypervolume");
    if (!dominates(p, ref, orientation))
      throw std::invalid_argument("hypervolume: a member does not dominate the reference point");
  }
  if (points.empty()) return 0.0;
  const auto r = to_minimization(ref, orientation);
  return hv_rec(nondominated_min(canonical(points, orientation)), r);
}

double hypervolume(const ParetoSet& set, std::span<const double> ref) {
  Points pts;
  for (const auto& m : set.members()) pts.push_back(m.objectives);
  return hypervolume(pts, ref, set.orientation());
}

double hypervolume_clipped(std::span<const std::vector<double>> points, std::span<const double> ref,
                           const Orientation& orientation) {
  Points kept;
  for (const auto& p : points) {
    check_dims(p.size(), orientation.size(), "hypervolume");
    bool inside = true;
    for (std::size_t j = 0; j < p.size() && inside; ++j)
      inside = orientation[j] == Sense::kMaximize ? p[j] > ref[j] : p[j] < ref[j];
    if (inside) kept.push_back(p);
  }
  return hypervolume(kept, ref, orientation);
}

double hypervolume_clipped(const ParetoSet& set, std::span<const double> ref) {
  Points pts;
  for (const auto& m : set.members()) pts.push_back(m.objectives);
  return hypervolume_clipped(pts, ref, set.orientation());
}

MonteCarloEstimate hypervolume_monte_carlo(std::span<const std::vector<double>> points,
                                           std::span<const double> ref, const Orientation& orientation,
                                           std::size_t samples, std::uint64_t seed) {
  if (points.empty()) return {};
  const Points pts = canonical(points, orientation);
  const auto r = to_minimization(ref, orientation);
  const std::size_t d = r.size();
  std::vector<double> lo(r);
  for (const auto& p : pts)
    for (std::size_t j = 0; j < d; ++j) lo[j] = std::min(lo[j], p[j]);
  double box = 1.0;
  for (std::size_t j = 0; j < d; ++j) box *= r[j] - lo[j];
  Rng rng(seed);
  std::vector<double> z(d);
  std::size_t hits = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    for (std::size_t j = 0; j < d; ++j) z[j] = lo[j] + (r[j] - lo[j]) * uniform01(rng);
    for (const auto& p : pts) {
      bool covered = true;
      for (std::size_t j = 0; j < d && covered; ++j) covered = p[j] <= z[j];
      if (covered) {
        ++hits;
        break;
      }
    }
  }
  const double frac = static_cast<double>(hits) / static_cast<double>(samples);
  return {box * frac, box * std::sqrt(frac * (1.0 - frac) / static_cast<double>(samples))};
}

double adrs(std::span<const std::vector<double>> found, std::span<const std::vector<double>> truth,
            std::span<const double> scale) {
  if (truth.empty()) throw std::invalid_argument("adrs: empty reference set");
  const std::size_t d = truth[0].size();
  std::vector<double> s(d, 1.0);
  if (!scale.empty()) {
    check_dims(scale.size(), d, "adrs");
    s.assign(scale.begin(), scale.end());
  } else {
    for (std::size_t j = 0; j < d; ++j) {
      double lo = truth[0][j], hi = truth[0][j];
      for (const auto& t : truth) {
        lo = std::min(lo, t[j]);
        hi = std::max(hi, t[j]);
      }
      s[j] = hi > lo ? hi - lo : 1.0;
    }
  }
  if (found.empty()) return std::numeric_limits<double>::infinity();
  double total = 0.0;
  for (const auto& t : truth) {
    check_dims(t.size(), d, "adrs");
    double best = std::numeric_limits<double>::infinity();
    for (const auto& f : found) {
      check_dims(f.size(), d, "adrs");
      double acc = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        const double diff = (f[j] - t[j]) / s[j];
        acc += diff * diff;
      }
      best = std::min(best, std::sqrt(acc));
    }
    total += best;
  }
  return total / static_cast<double>(truth.size());
}

double adrs(const ParetoSet& found, const ParetoSet& truth, std::span<const double> scale) {
  Points f, t;
  for (const auto& m : found.members()) f.push_back(m.objectives);
  for (const auto& m : truth.members()) t.push_back(m.objectives);
  return adrs(f, t, scale);
}

}  // namespace adse
