// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "attndse/design_space.hpp"
#include "attndse/oracle.hpp"

namespace adse {

enum class Sense { kMinimize, kMaximize };
using Orientation = std::vector<Sense>;

// Orientation for a list of objectives (IPC maximized, the rest minimized).
Orientation orientation_for(std::span<const Objective> objectives);
// Projects an objective vector onto the listed objectives.
std::vector<double> project(const ObjectiveVector& v, std::span<const Objective> objectives);

// Flips maximized objectives so that smaller is better everywhere.
std::vector<double> to_minimization(std::span<const double> v, std::span<const Sense> orientation);

// a is at least as good as b everywhere and strictly better somewhere.
// Throws std::invalid_argument on a dimension mismatch.
bool dominates(std::span<const double> a, std::span<const double> b, std::span<const Sense> orientation);

// Objective vectors closer than this (per component) are the same point.
inline constexpr double kObjectiveTolerance = 1e-12;
bool objectives_equal(std::span<const double> a, std::span<const double> b);

struct ParetoMember {
  DesignPoint point;
  std::vector<double> objectives;  // in the set's orientation, not flipped
};

// Mutually non-dominated members. Among members with equal objectives only
// the lexicographically smallest design point is kept, so the content does
// not depend on insertion order.
class ParetoSet {
 public:
  ParetoSet() = default;
  explicit ParetoSet(Orientation orientation) : orientation_(std::move(orientation)) {}

  // Inserts unless dominated or duplicated; evicts members the newcomer
  // dominates. Returns true if the set changed.
  bool insert(const DesignPoint& point, std::vector<double> objectives);
  // True if inserting these objectives would change the front (not dominated
  // by and not equal to any member).
  bool would_expand(std::span<const double> objectives) const;
  bool contains_point(const DesignPoint& point) const;

  const std::vector<ParetoMember>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  const Orientation& orientation() const { return orientation_; }
  // Members sorted by objectives then design point.
  std::vector<ParetoMember> sorted_members() const;

 private:
  Orientation orientation_;
  std::vector<ParetoMember> members_;
};

// The non-dominated subset of `points` (order independent).
ParetoSet pareto_filter(std::span<const ParetoMember> points, const Orientation& orientation);

// Reference point: the worst observed value of each objective pushed out by
// `margin` of its magnitude (x1.1 for minimized, x0.9 for maximized
// objectives at the default margin).
std::vector<double> reference_point(std::span<const std::vector<double>> points,
                                    const Orientation& orientation, double margin = 0.1);

// Exact hypervolume dominated by `points` and bounded by `ref`: a sweep line
// in 2-D and slicing over the last objective above that. Throws
// std::invalid_argument if some point does not dominate ref.
double hypervolume(std::span<const std::vector<double>> points, std::span<const double> ref,
                   const Orientation& orientation);
double hypervolume(const ParetoSet& set, std::span<const double> ref);
// As above but points that do not dominate ref contribute nothing.
double hypervolume_clipped(std::span<const std::vector<double>> points, std::span<const double> ref,
                           const Orientation& orientation);
double hypervolume_clipped(const ParetoSet& set, std::span<const double> ref);

struct MonteCarloEstimate {
  double value = 0.0;
  double std_error = 0.0;
};
// Uniform sampling of the box between the ideal point and ref.
MonteCarloEstimate hypervolume_monte_carlo(std::span<const std::vector<double>> points,
                                           std::span<const double> ref, const Orientation& orientation,
                                           std::size_t samples, std::uint64_t seed);

// Average distance from reference set: mean over truth members of the
// Euclidean distance to the nearest found member, with objective j divided
// by scale[j]. An empty scale uses the truth set's per-objective range (1
// where the range is zero). Throws std::invalid_argument on empty truth;
// returns +inf when found is empty.
double adrs(std::span<const std::vector<double>> found, std::span<const std::vector<double>> truth,
            std::span<const double> scale = {});
double adrs(const ParetoSet& found, const ParetoSet& truth, std::span<const double> scale = {});

}  // namespace adse
