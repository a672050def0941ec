// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "attndse/pareto.hpp"
#include "attndse/rng.hpp"

namespace adse {
namespace {

using Vec = std::vector<double>;
const Orientation kMin2{Sense::kMinimize, Sense::kMinimize};
const Orientation kMin3{Sense::kMinimize, Sense::kMinimize, Sense::kMinimize};

DesignPoint pt(std::uint32_t i) { return DesignPoint{{i}}; }

std::vector<ParetoMember> members_of(const std::vector<Vec>& objs) {
  std::vector<ParetoMember> m;
  for (std::size_t i = 0; i < objs.size(); ++i) m.push_back({pt(static_cast<std::uint32_t>(i)), objs[i]});
  return m;
}

// Pairwise filter written independently: keep i when nothing dominates it,
// then collapse equal objective vectors onto the smallest point.
std::set<DesignPoint> brute_force_front(const std::vector<ParetoMember>& m, const Orientation& o) {
  auto better_eq = [&](const Vec& a, const Vec& b) {
    bool strict = false;
    for (std::size_t k = 0; k < a.size(); ++k) {
      const double x = o[k] == Sense::kMaximize ? -a[k] : a[k];
      const double y = o[k] == Sense::kMaximize ? -b[k] : b[k];
      if (x > y) return false;
      if (x < y) strict = true;
    }
    return strict;
  };
  std::set<DesignPoint> out;
  for (std::size_t i = 0; i < m.size(); ++i) {
    bool keep = true;
    for (std::size_t j = 0; j < m.size() && keep; ++j) {
      if (better_eq(m[j].objectives, m[i].objectives)) keep = false;
      if (j != i && m[j].objectives == m[i].objectives && m[j].point < m[i].point) keep = false;
    }
    if (keep) out.insert(m[i].point);
  }
  return out;
}

std::set<DesignPoint> points_of(const ParetoSet& s) {
  std::set<DesignPoint> out;
  for (const auto& m : s.members()) out.insert(m.point);
  return out;
}

std::vector<Vec> random_points(Rng& rng, std::size_t n, std::size_t d, bool discrete) {
  std::vector<Vec> pts(n, Vec(d));
  for (auto& p : pts)
    for (auto& x : p) x = discrete ? static_cast<double>(uniform_index(rng, 6)) : uniform01(rng);
  return pts;
}

TEST(Pareto, DominatesExamples) {
  EXPECT_FALSE(dominates(Vec{1, 1}, Vec{1, 1}, kMin2));
  EXPECT_TRUE(dominates(Vec{1, 1}, Vec{2, 2}, kMin2));
  EXPECT_FALSE(dominates(Vec{1, 3}, Vec{3, 1}, kMin2));
  EXPECT_FALSE(dominates(Vec{3, 1}, Vec{1, 3}, kMin2));
  EXPECT_TRUE(dominates(Vec{1, 2}, Vec{1, 3}, kMin2));
  const Orientation ipc_power{Sense::kMaximize, Sense::kMinimize};
  EXPECT_TRUE(dominates(Vec{2, 1}, Vec{1, 1}, ipc_power));
  EXPECT_FALSE(dominates(Vec{1, 1}, Vec{2, 1}, ipc_power));
  EXPECT_THROW(dominates(Vec{1, 1}, Vec{1, 1, 1}, kMin2), std::invalid_argument);
  EXPECT_THROW(dominates(Vec{1, 1}, Vec{1, 1}, kMin3), std::invalid_argument);
}

TEST(Pareto, OrientationAndProjection) {
  const std::vector<Objective> objs{Objective::kIpc, Objective::kArea};
  const auto o = orientation_for(objs);
  ASSERT_EQ(o.size(), 2u);
  EXPECT_EQ(o[0], Sense::kMaximize);
  EXPECT_EQ(o[1], Sense::kMinimize);
  EXPECT_EQ(project(ObjectiveVector{1.5, 2.0, 3.0}, objs), (Vec{1.5, 3.0}));
  EXPECT_EQ(to_minimization(Vec{1.5, 3.0}, o), (Vec{-1.5, 3.0}));
}

TEST(Pareto, FilterExamples) {
  const auto same = pareto_filter(members_of({{1, 2}, {1, 2}, {1, 2}}), kMin2);
  ASSERT_EQ(same.size(), 1u);
  EXPECT_EQ(same.members()[0].point, pt(0));
  const auto chain = pareto_filter(members_of({{3, 3}, {1, 1}, {2, 2}}), kMin2);
  ASSERT_EQ(chain.size(), 1u);
  EXPECT_EQ(chain.members()[0].point, pt(1));
  EXPECT_TRUE(pareto_filter(std::vector<ParetoMember>{}, kMin2).empty());
}

TEST(Pareto, FilterMatchesBruteForce) {
  Rng rng(100);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t d = 2 + trial % 2;
    const std::size_t n = 1 + uniform_index(rng, 200);
    Orientation o(d, Sense::kMinimize);
    if (trial % 3 == 0) o[0] = Sense::kMaximize;
    const auto m = members_of(random_points(rng, n, d, trial % 4 == 1));
    ASSERT_EQ(points_of(pareto_filter(m, o)), brute_force_front(m, o)) << "trial " << trial;
  }
}

TEST(Pareto, FilterIdempotentAndOrderIndependent) {
  Rng rng(101);
  for (int trial = 0; trial < 50; ++trial) {
    auto m = members_of(random_points(rng, 80, 3, trial % 2 == 0));
    const auto once = pareto_filter(m, kMin3);
    const auto twice = pareto_filter(once.members(), kMin3);
    EXPECT_EQ(points_of(once), points_of(twice));
    std::shuffle(m.begin(), m.end(), rng);
    const auto shuffled = pareto_filter(m, kMin3);
    const auto a = once.sorted_members(), b = shuffled.sorted_members();
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_EQ(a[i].point, b[i].point);
      EXPECT_EQ(a[i].objectives, b[i].objectives);
    }
  }
}

TEST(Pareto, InsertEvictsAndReportsChange) {
  ParetoSet s(kMin2);
  EXPECT_TRUE(s.insert(pt(0), {2, 2}));
  EXPECT_TRUE(s.insert(pt(1), {1, 3}));
  EXPECT_FALSE(s.insert(pt(2), {3, 3}));  // dominated
  EXPECT_FALSE(s.insert(pt(3), {2, 2}));  // duplicate objectives, larger point
  EXPECT_TRUE(s.would_expand(Vec{0.5, 5}));
  EXPECT_FALSE(s.would_expand(Vec{2, 2}));
  EXPECT_TRUE(s.insert(pt(4), {1, 1}));   // evicts both
  EXPECT_EQ(s.size(), 1u);
  EXPECT_TRUE(s.contains_point(pt(4)));
  EXPECT_FALSE(s.contains_point(pt(0)));
}

TEST(Pareto, MutualNonDominanceUnderRandomInsertion) {
  Rng rng(102);
  ParetoSet s(kMin3);
  const auto pts = random_points(rng, 500, 3, false);
  for (std::size_t i = 0; i < pts.size(); ++i) s.insert(pt(static_cast<std::uint32_t>(i)), pts[i]);
  for (const auto& a : s.members())
    for (const auto& b : s.members()) EXPECT_FALSE(dominates(a.objectives, b.objectives, kMin3));
  EXPECT_EQ(points_of(s), brute_force_front(members_of(pts), kMin3));
}

TEST(Pareto, HypervolumeHandExamples) {
  const Vec ref{1, 1};
  EXPECT_EQ(hypervolume(std::vector<Vec>{}, ref, kMin2), 0.0);
  EXPECT_NEAR(hypervolume(std::vector<Vec>{{0, 0}}, ref, kMin2), 1.0, 1e-12);
  EXPECT_NEAR(hypervolume(std::vector<Vec>{{0, 0.5}, {0.5, 0}}, ref, kMin2), 0.75, 1e-12);
  // Staircase: 0.9*0.3 + 0.6*0.4 + 0.2*0.2.
  EXPECT_NEAR(hypervolume(std::vector<Vec>{{0.1, 0.7}, {0.4, 0.3}, {0.8, 0.1}}, ref, kMin2), 0.55, 1e-12);
  // A dominated member adds nothing.
  EXPECT_NEAR(hypervolume(std::vector<Vec>{{0.1, 0.7}, {0.4, 0.3}, {0.8, 0.1}, {0.5, 0.5}}, ref, kMin2), 0.55,
              1e-12);
  // Maximized IPC against minimized power: (2 - 0) * (3 - 1).
  const Orientation ipc_power{Sense::kMaximize, Sense::kMinimize};
  EXPECT_NEAR(hypervolume(std::vector<Vec>{{2, 1}}, Vec{0, 3}, ipc_power), 4.0, 1e-12);
  // 3-D: unit cube, then two boxes 0.5 + 0.25 overlapping in 0.125.
  EXPECT_NEAR(hypervolume(std::vector<Vec>{{0, 0, 0}}, Vec{1, 1, 1}, kMin3), 1.0, 1e-12);
  EXPECT_NEAR(hypervolume(std::vector<Vec>{{0, 0, 0.5}, {0.5, 0.5, 0}}, Vec{1, 1, 1}, kMin3), 0.625, 1e-12);
}

TEST(Pareto, HypervolumeErrors) {
  EXPECT_THROW(hypervolume(std::vector<Vec>{{2, 0}}, Vec{1, 1}, kMin2), std::invalid_argument);
  EXPECT_THROW(hypervolume(std::vector<Vec>{{0, 0, 0}}, Vec{1, 1}, kMin2), std::invalid_argument);
  EXPECT_NEAR(hypervolume_clipped(std::vector<Vec>{{2, 0}, {0.5, 0.5}}, Vec{1, 1}, kMin2), 0.25, 1e-12);
}

// Counts unit cells of the grid [0, ref) covered by some point's box.
double grid_volume(const std::vector<Vec>& pts, const Vec& ref) {
  const int r0 = static_cast<int>(ref[0]), r1 = static_cast<int>(ref[1]), r2 = static_cast<int>(ref[2]);
  double count = 0.0;
  for (int x = 0; x < r0; ++x)
    for (int y = 0; y < r1; ++y)
      for (int z = 0; z < r2; ++z)
        for (const auto& p : pts)
          if (p[0] <= x && p[1] <= y && p[2] <= z) {
            count += 1.0;
            break;
          }
  return count;
}

TEST(Pareto, Hypervolume3DMatchesGridCount) {
  Rng rng(103);
  for (int trial = 0; trial < 100; ++trial) {
    const auto pts = random_points(rng, 1 + uniform_index(rng, 30), 3, true);
    const Vec ref{6, 6, 6};
    EXPECT_EQ(hypervolume(pts, ref, kMin3), grid_volume(pts, ref)) << "trial " << trial;
  }
}

TEST(Pareto, Hypervolume3DMatchesMonteCarlo) {
  Rng rng(104);
  for (int trial = 0; trial < 20; ++trial) {
    const auto pts = random_points(rng, 5 + uniform_index(rng, 40), 3, false);
    const Vec ref{1.1, 1.1, 1.1};
    const double exact = hypervolume(pts, ref, kMin3);
    const auto mc = hypervolume_monte_carlo(pts, ref, kMin3, 200000, 900 + static_cast<std::uint64_t>(trial));
    EXPECT_GT(mc.std_error, 0.0);
    EXPECT_LE(std::abs(mc.value - exact), 3.0 * mc.std_error) << "trial " << trial;
  }
}

TEST(Pareto, HypervolumeMonotoneUnderInsertion) {
  Rng rng(105);
  const Vec ref{1.1, 1.1, 1.1};
  ParetoSet s(kMin3);
  double prev = 0.0;
  for (const auto& p : random_points(rng, 300, 3, false)) {
    const bool expands = s.would_expand(p);
    s.insert(pt(static_cast<std::uint32_t>(s.size() + 1000)), p);
    const double hv = hypervolume(s, ref);
    if (expands) EXPECT_GT(hv, prev);
    else EXPECT_EQ(hv, prev);
    prev = hv;
  }
}

TEST(Pareto, HypervolumePermutationInvariant) {
  Rng rng(106);
  for (std::size_t d : {2u, 3u}) {
    auto pts = random_points(rng, 60, d, false);
    const Vec ref(d, 1.1);
    const Orientation o(d, Sense::kMinimize);
    const double base = hypervolume(pts, ref, o);
    for (int k = 0; k < 10; ++k) {
      std::shuffle(pts.begin(), pts.end(), rng);
      EXPECT_EQ(hypervolume(pts, ref, o), base);
    }
  }
}

TEST(Pareto, ReferencePoint) {
  const std::vector<Vec> pts{{1, 2}, {3, 1}};
  const auto r = reference_point(pts, kMin2);
  EXPECT_NEAR(r[0], 3.3, 1e-12);
  EXPECT_NEAR(r[1], 2.2, 1e-12);
  const Orientation ipc_power{Sense::kMaximize, Sense::kMinimize};
  const auto r2 = reference_point(std::vector<Vec>{{0.5, 2}, {2.0, 4}}, ipc_power);
  EXPECT_NEAR(r2[0], 0.45, 1e-12);
  EXPECT_NEAR(r2[1], 4.4, 1e-12);
  for (const auto& p : pts) EXPECT_TRUE(dominates(p, r, kMin2));
}

double brute_adrs(const std::vector<Vec>& found, const std::vector<Vec>& truth) {
  const std::size_t d = truth[0].size();
  Vec lo(d, std::numeric_limits<double>::infinity()), hi(d, -std::numeric_limits<double>::infinity());
  for (const auto& t : truth)
    for (std::size_t k = 0; k < d; ++k) {
      lo[k] = std::min(lo[k], t[k]);
      hi[k] = std::max(hi[k], t[k]);
    }
  double total = 0.0;
  for (const auto& t : truth) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& f : found) {
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        const double range = hi[k] > lo[k] ? hi[k] - lo[k] : 1.0;
        s += ((t[k] - f[k]) / range) * ((t[k] - f[k]) / range);
      }
      best = std::min(best, std::sqrt(s));
    }
    total += best;
  }
  return total / static_cast<double>(truth.size());
}

TEST(Pareto, AdrsExamples) {
  const std::vector<Vec> truth{{0, 1}, {1, 0}};
  EXPECT_EQ(adrs(truth, truth), 0.0);
  EXPECT_NEAR(adrs(std::vector<Vec>{{1, 1}}, std::vector<Vec>{{0, 0}}), std::sqrt(2.0), 1e-12);
  std::vector<Vec> superset = truth;
  superset.push_back({0.5, 0.5});
  EXPECT_EQ(adrs(superset, truth), 0.0);
  EXPECT_THROW(adrs(truth, std::vector<Vec>{}), std::invalid_argument);
  EXPECT_TRUE(std::isinf(adrs(std::vector<Vec>{}, truth)));
  const Vec scale{2, 4};
  EXPECT_NEAR(adrs(std::vector<Vec>{{2, 4}}, std::vector<Vec>{{0, 0}}, scale), std::sqrt(2.0), 1e-12);
}

TEST(Pareto, AdrsMatchesBruteForce) {
  Rng rng(107);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = 2 + trial % 2;
    const auto truth = random_points(rng, 1 + uniform_index(rng, 30), d, false);
    const auto found = random_points(rng, 1 + uniform_index(rng, 30), d, false);
    EXPECT_NEAR(adrs(found, truth), brute_adrs(found, truth), 1e-12);
  }
}

}  // namespace
}  // namespace adse
