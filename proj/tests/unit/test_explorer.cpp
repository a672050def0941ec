// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <atomic>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "attndse/design_space.hpp"
#include "attndse/error.hpp"
#include "attndse/explorer.hpp"
#include "attndse/microarch_graph.hpp"
#include "attndse/oracle.hpp"
#include "attndse/pareto.hpp"
#include "explore_fixtures.hpp"
#include "test_paths.hpp"

namespace adse {
namespace {

using testing::MonotoneOracle;
using testing::true_front;

// Heatmap whose parameter columns sum to `sums` (token column gets the rest).
AttentionHeatmap heatmap_with_columns(const std::vector<double>& sums) {
  const std::size_t n = sums.size() + 1;
  AttentionHeatmap h{n, std::vector<double>(n * n, 0.0)};
  for (std::size_t j = 0; j < sums.size(); ++j) h.weights[j + 1] = sums[j];  // all mass in row 0
  return h;
}

SerializationOrder order_of(std::vector<std::size_t> order) {
  SerializationOrder o;
  o.order = std::move(order);
  o.degrees.assign(o.order.size(), 0);
  return o;
}

std::vector<std::uint32_t> parse_key(const std::string& key) {
  std::vector<std::uint32_t> out;
  std::size_t pos = 0;
  while (pos <= key.size()) {
    const std::size_t dash = std::min(key.find('-', pos), key.size());
    out.push_back(static_cast<std::uint32_t>(std::stoul(key.substr(pos, dash - pos))));
    pos = dash + 1;
  }
  return out;
}

// Prediction = oracle value scaled by a fixed point-dependent factor.
class SkewedPredictor final : public Predictor {
 public:
  explicit SkewedPredictor(const PerfectPredictor& inner) : inner_(inner) {}
  std::vector<ObjectiveVector> predict(std::span<const DesignPoint> points) const override {
    auto out = inner_.predict(points);
    for (std::size_t i = 0; i < out.size(); ++i) {
      const double f = 1.0 + 0.05 * static_cast<double>(points[i].indices[0] % 3);
      out[i].ipc *= f;
      out[i].power /= f;
    }
    return out;
  }
  std::vector<AttentionHeatmap> heatmaps(std::span<const DesignPoint> points, Objective o) const override {
    return inner_.heatmaps(points, o);
  }
  const SerializationOrder& order() const override { return inner_.order(); }

 private:
  const PerfectPredictor& inner_;
};

struct Space4 {
  DesignSpace space = load_design_space(config_path("space4.json"));
  SerializationOrder order = serialize_space(space, load_core_graph(config_path("table1_graph.json")));
  SyntheticOracle oracle{space, builtin_oracle_config("compute_bound")};
  PerfectPredictor perfect{space, oracle, order};
};

TEST(Explorer, BottleneckAnalyzeExamples) {
  const auto order = order_of({2, 0, 1});
  Rng rng(1);
  const auto ipc = bottleneck_analyze(heatmap_with_columns({0.4, 0.1, 0.5}), Objective::kIpc, order, rng);
  EXPECT_EQ(ipc.position, 1u);
  EXPECT_EQ(ipc.parameter, 0u);
  EXPECT_EQ(ipc.direction, +1);
  EXPECT_FALSE(ipc.fallback);
  const auto power = bottleneck_analyze(heatmap_with_columns({0.4, 0.1, 0.5}), Objective::kPower, order, rng);
  EXPECT_EQ(power.position, 2u);
  EXPECT_EQ(power.parameter, 1u);
  EXPECT_EQ(power.direction, -1);
  const auto area = bottleneck_analyze(heatmap_with_columns({0.6, 0.1, 0.3}), Objective::kArea, order, rng);
  EXPECT_EQ(area.parameter, 2u);
  EXPECT_EQ(area.direction, -1);
  const auto grow = bottleneck_analyze(heatmap_with_columns({0.6, 0.1, 0.3}), Objective::kArea, order, rng,
                                       DirectionPolicy::kAlwaysGrow);
  EXPECT_EQ(grow.direction, +1);
}

TEST(Explorer, BottleneckTiesAndDegenerate) {
  const auto order = order_of({0, 1, 2, 3});
  Rng rng(2);
  EXPECT_EQ(bottleneck_analyze(heatmap_with_columns({0.3, 0.1, 0.1, 0.5}), Objective::kIpc, order, rng).position, 1u);
  EXPECT_EQ(bottleneck_analyze(heatmap_with_columns({0.5, 0.1, 0.5, 0.2}), Objective::kPower, order, rng).position,
            0u);
  std::set<std::size_t> seen;
  for (int k = 0; k < 200; ++k) {
    const auto d = bottleneck_analyze(heatmap_with_columns({0.25, 0.25, 0.25, 0.25}), Objective::kIpc, order, rng);
    EXPECT_TRUE(d.fallback);
    seen.insert(d.parameter);
  }
  EXPECT_EQ(seen.size(), 4u);
  EXPECT_THROW(bottleneck_analyze(heatmap_with_columns({0.5, 0.5}), Objective::kIpc, order, rng), InputError);
}

TEST(Explorer, BottleneckRanking) {
  const auto order = order_of({3, 2, 1, 0});
  Rng a(3), b(3);
  const auto h = heatmap_with_columns({0.3, 0.1, 0.3, 0.2});
  const auto first = bottleneck_analyze(h, Objective::kIpc, order, a);
  const auto ipc = bottleneck_ranking(h, Objective::kIpc, order, b);
  ASSERT_EQ(ipc.size(), 4u);
  EXPECT_EQ(ipc[0].position, first.position);
  std::vector<std::size_t> pos;
  for (const auto& d : ipc) pos.push_back(d.position);
  EXPECT_EQ(pos, (std::vector<std::size_t>{1, 3, 0, 2}));
  EXPECT_EQ(ipc[2].parameter, 3u);
  pos.clear();
  for (const auto& d : bottleneck_ranking(h, Objective::kPower, order, b)) {
    pos.push_back(d.position);
    EXPECT_EQ(d.direction, -1);
  }
  EXPECT_EQ(pos, (std::vector<std::size_t>{0, 2, 3, 1}));

  const auto flat = heatmap_with_columns({0.25, 0.25, 0.25, 0.25});
  Rng c(4), d(4);
  const auto pick = bottleneck_analyze(flat, Objective::kIpc, order, c);
  const auto perm = bottleneck_ranking(flat, Objective::kIpc, order, d);
  EXPECT_EQ(perm[0].position, pick.position);
  std::set<std::size_t> all;
  for (const auto& x : perm) {
    EXPECT_TRUE(x.fallback);
    all.insert(x.position);
  }
  EXPECT_EQ(all.size(), 4u);
}

TEST(Explorer, PerfectHeatmapPointsAtBindingResource) {
  // IntALU starves execution; once it grows, the instruction queue binds.
  const DesignSpace space = load_design_space(config_path("space10.json"));
  SyntheticOracle oracle(space, builtin_oracle_config("compute_bound"));
  const auto order = serialize_space(space, load_core_graph(config_path("table1_graph.json")));
  PerfectPredictor perfect(space, oracle, order);
  DesignPoint p{{2, 11, 11, 11, 14, 24, 1, 0, 7, 2}};
  ASSERT_EQ(oracle.binding_group(p), ResourceGroup::kExecute);
  Rng rng(5);
  std::vector<std::string> picks;
  for (int attempt = 0; attempt < 3; ++attempt) {
    const auto map = perfect.heatmaps(std::span(&p, 1), Objective::kIpc)[0];
    const auto d = bottleneck_analyze(map, Objective::kIpc, order, rng);
    EXPECT_EQ(resource_group_of(space.param(d.parameter).name), oracle.binding_group(p)) << attempt;
    picks.push_back(space.param(d.parameter).name);
    p = step_parameter(space, p, d.parameter, d.direction).point;
  }
  EXPECT_EQ(picks, (std::vector<std::string>{"IntALU", "IntALU", "InstQueue"}));
}

TEST(Explorer, BindingGroupChosenWithinThreeAttempts) {
  const DesignSpace space = load_design_space(config_path("space10.json"));
  SyntheticOracle oracle(space, builtin_oracle_config("compute_bound"));
  const auto order = serialize_space(space, load_core_graph(config_path("table1_graph.json")));
  PerfectPredictor perfect(space, oracle, order);
  Rng rng(6);
  std::size_t hit = 0, total = 0;
  for (const auto& start : random_sample(space, 200, 7)) {
    // Only points where some single step in the binding group helps.
    const auto b = oracle.breakdown(start);
    bool liftable = false;
    for (std::size_t i = 0; i < space.size(); ++i) {
      if (resource_group_of(space.param(i).name) != b.binding) continue;
      const auto s = step_parameter(space, start, i, +1);
      liftable = liftable || (!s.at_boundary && oracle.evaluate_uncounted(s.point).ipc > b.objectives.ipc);
    }
    if (!liftable) continue;
    ++total;
    const auto map = perfect.heatmaps(std::span(&start, 1), Objective::kIpc)[0];
    const auto ranking = bottleneck_ranking(map, Objective::kIpc, order, rng);
    for (std::size_t k = 0; k < 3; ++k)
      if (resource_group_of(space.param(ranking[k].parameter).name) == b.binding) {
        ++hit;
        break;
      }
  }
  ASSERT_GT(total, 50u);
  EXPECT_EQ(hit, total);
}

TEST(Explorer, ZeroIterationsGivesFilteredInitialPredictions) {
  Space4 s;
  SkewedPredictor skewed(s.perfect);
  ExplorationConfig cfg;
  cfg.max_iterations = 0;
  cfg.truth_feedback = false;
  cfg.seed = 8;
  const auto r = explore(s.space, skewed, s.oracle, cfg);
  const auto initial = random_sample(s.space, cfg.initial_samples, mix_seed(cfg.seed, 1));
  std::vector<ParetoMember> m;
  const auto preds = skewed.predict(initial);
  for (std::size_t i = 0; i < initial.size(); ++i) m.push_back({initial[i], project(preds[i], cfg.objectives)});
  const auto want = pareto_filter(m, orientation_for(cfg.objectives)).sorted_members();
  const auto got = r.predicted_front.sorted_members();
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    EXPECT_EQ(got[i].point, want[i].point);
    EXPECT_EQ(got[i].objectives, want[i].objectives);
  }
  EXPECT_EQ(r.iterations.size(), 1u);
  EXPECT_TRUE(r.candidates.empty());
}

TEST(Explorer, PerfectPredictorReachesTrueFront) {
  Space4 s;
  const std::vector<Objective> objs(kAllObjectives.begin(), kAllObjectives.end());
  const auto truth = true_front(s.space, s.oracle, objs);
  const auto orient = orientation_for(objs);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    ExplorationConfig cfg;
    cfg.seed = seed;
    cfg.max_iterations = 50;
    cfg.initial_samples = 16;
    const auto r = explore(s.space, s.perfect, s.oracle, cfg);
    const double true_phv = hypervolume_clipped(truth, r.reference);
    EXPECT_GE(r.iterations.back().phv, 0.95 * true_phv) << "seed " << seed;
    for (const auto& [p, v] : r.final_scores)
      for (const auto& t : truth.members())
        EXPECT_FALSE(dominates(t.objectives, project(v, objs), orient)) << "seed " << seed << " " << p.key();
  }
}

TEST(Explorer, PhvNondecreasingAndAccountingExact) {
  Space4 s;
  for (Acquisition acq : {Acquisition::kAba, Acquisition::kRandom})
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      ExplorationConfig cfg;
      cfg.seed = seed;
      cfg.acquisition = acq;
      cfg.initial_samples = 8;
      cfg.eval_budget = 40;
      SkewedPredictor skewed(s.perfect);
      s.oracle.reset_calls();
      const auto r = run_exploration(s.space, skewed, s.oracle, cfg);
      EXPECT_EQ(s.oracle.calls(), r.evaluations);
      EXPECT_LE(r.evaluations, cfg.eval_budget);
      EXPECT_EQ(r.verified.size(), r.evaluations);
      std::size_t measured = 0;
      for (const auto& c : r.candidates) measured += c.measured ? 1 : 0;
      EXPECT_LE(measured, r.evaluations);
      for (std::size_t i = 1; i < r.iterations.size(); ++i) {
        EXPECT_GE(r.iterations[i].phv, r.iterations[i - 1].phv);
        EXPECT_GE(r.iterations[i].evaluations, r.iterations[i - 1].evaluations);
      }
    }
}

TEST(Explorer, EveryCandidateIsOneStepFromItsParent) {
  const DesignSpace space = load_design_space(config_path("space10.json"));
  SyntheticOracle oracle(space, builtin_oracle_config("memory_bound"));
  const auto order = serialize_space(space, load_core_graph(config_path("table1_graph.json")));
  PerfectPredictor perfect(space, oracle, order);
  ExplorationConfig cfg;
  cfg.seed = 9;
  cfg.max_iterations = 12;
  const auto r = explore(space, perfect, oracle, cfg);
  ASSERT_FALSE(r.candidates.empty());
  for (const auto& c : r.candidates) {
    const auto parent = parse_key(c.parent), child = parse_key(c.candidate);
    ASSERT_TRUE(c.parameter.has_value());
    std::size_t changed = 0;
    for (std::size_t i = 0; i < parent.size(); ++i)
      if (parent[i] != child[i]) {
        ++changed;
        EXPECT_EQ(i, *c.parameter);
        EXPECT_EQ(static_cast<int>(child[i]) - static_cast<int>(parent[i]), c.direction);
      }
    if (c.at_boundary) EXPECT_LE(changed, 1u);
    else EXPECT_EQ(changed, 1u);
  }
}

TEST(Explorer, ForcedWalk) {
  const DesignSpace space = parse_design_space(R"({"name":"walk","parameters":[)"
                                               R"({"name":"IssueWidth","stage":"Issue","values":"1:10:1"},)"
                                               R"({"name":"IntALU","stage":"Execute","values":[3,4,5]},)"
                                               R"({"name":"InstQueue","stage":"Issue","values":[16,32]}]})");
  MonotoneOracle oracle(space, 0);
  PerfectPredictor perfect(space, oracle, identity_order(space, 3));
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    ExplorationConfig cfg;
    cfg.seed = seed;
    cfg.initial_samples = 1;
    cfg.objectives = {Objective::kIpc};
    cfg.max_iterations = 50;
    const auto start = random_sample(space, 1, mix_seed(seed, 1))[0];
    const auto r = explore(space, perfect, oracle, cfg);
    const std::size_t steps = 10 - start.indices[0] - 1;
    ASSERT_GE(r.candidates.size(), steps);
    DesignPoint expect = start;
    for (std::size_t k = 0; k < steps; ++k) {
      const auto& c = r.candidates[k];
      EXPECT_EQ(c.iteration, k + 1);
      EXPECT_EQ(c.parent, expect.key());
      EXPECT_EQ(c.parameter, 0u);
      EXPECT_EQ(c.direction, +1);
      EXPECT_EQ(c.rank, 0u);
      EXPECT_FALSE(c.fallback);
      EXPECT_TRUE(c.accepted);
      ++expect.indices[0];
      EXPECT_EQ(c.candidate, expect.key());
    }
    ASSERT_EQ(r.predicted_front.size(), 1u);
    EXPECT_EQ(r.predicted_front.members()[0].point, expect);
    EXPECT_EQ(iterations_to_fraction(r.iterations, 1.0), steps);
  }
}

// Once every front member's neighbours are tried the loop stops instead of
// idling to I_max.
TEST(Explorer, StopsWhenNeighbourhoodExhausted) {
  const DesignSpace space = parse_design_space(R"({"name":"tiny","parameters":[)"
                                               R"({"name":"IssueWidth","stage":"Issue","values":[2,4,6]},)"
                                               R"({"name":"IntALU","stage":"Execute","values":[3,4]}]})");
  SyntheticOracle oracle(space, builtin_oracle_config("compute_bound"));
  PerfectPredictor perfect(space, oracle, identity_order(space, 3));
  ExplorationConfig cfg;
  cfg.initial_samples = 2;
  cfg.max_iterations = 1000;
  cfg.seed = 3;
  const auto r = explore(space, perfect, oracle, cfg);
  EXPECT_EQ(r.stop_reason, "neighborhood_exhausted");
  EXPECT_LT(r.iterations.size(), 1000u);
  EXPECT_LE(r.evaluations, 6u);
  // The final iteration found no untried step for any member.
  const std::size_t last = r.iterations.back().iteration;
  std::size_t records = 0;
  for (const auto& c : r.candidates)
    if (c.iteration == last) {
      EXPECT_TRUE(c.at_boundary);
      ++records;
    }
  EXPECT_EQ(records, r.predicted_front.size());
}

TEST(Explorer, BudgetZeroKeepsInitialFront) {
  Space4 s;
  ExplorationConfig cfg;
  cfg.eval_budget = 0;
  cfg.seed = 10;
  s.oracle.reset_calls();
  const auto r = explore(s.space, s.perfect, s.oracle, cfg);
  EXPECT_EQ(r.evaluations, 0u);
  EXPECT_EQ(s.oracle.calls(), 0u);
  EXPECT_TRUE(r.truncated);
  EXPECT_EQ(r.stop_reason, "budget");
  EXPECT_TRUE(r.candidates.empty());
  EXPECT_EQ(r.reporting_calls, r.predicted_front.size());
}

TEST(Explorer, TruncationFlag) {
  Space4 s;
  ExplorationConfig cfg;
  cfg.eval_budget = 3;
  cfg.seed = 11;
  for (std::size_t budget : {1u, 2u, 3u, 5u, 8u}) {
    cfg.eval_budget = budget;
    const auto r = explore(s.space, s.perfect, s.oracle, cfg);
    EXPECT_EQ(r.evaluations, budget);
    EXPECT_EQ(r.stop_reason, "budget");
    std::size_t unverified = 0;
    for (const auto& m : r.predicted_front.members()) unverified += r.verified.count(m.point) ? 0 : 1;
    EXPECT_EQ(r.truncated, unverified > 0) << budget;
    EXPECT_EQ(r.reporting_calls, unverified) << budget;
  }
}

TEST(Explorer, RandomSearchDeterministic) {
  Space4 s;
  ExplorationConfig cfg;
  cfg.seed = 12;
  cfg.acquisition = Acquisition::kRandom;
  cfg.eval_budget = 60;
  const auto a = random_search(s.space, s.perfect, s.oracle, cfg);
  const auto b = random_search(s.space, s.perfect, s.oracle, cfg);
  ASSERT_EQ(a.candidates.size(), b.candidates.size());
  for (std::size_t i = 0; i < a.candidates.size(); ++i) {
    EXPECT_EQ(a.candidates[i].candidate, b.candidates[i].candidate);
    EXPECT_EQ(a.candidates[i].accepted, b.candidates[i].accepted);
  }
  ASSERT_EQ(a.iterations.size(), b.iterations.size());
  for (std::size_t i = 0; i < a.iterations.size(); ++i) EXPECT_EQ(a.iterations[i].phv, b.iterations[i].phv);
  cfg.seed = 13;
  const auto c = random_search(s.space, s.perfect, s.oracle, cfg);
  EXPECT_NE(a.candidates.front().candidate, c.candidates.front().candidate);
}

TEST(Explorer, RandomWithoutReplacementRecoversTrueFront) {
  const DesignSpace space = parse_design_space(R"({"name":"tiny","parameters":[)"
                                               R"({"name":"IssueWidth","stage":"Issue","values":[2,4,6,8]},)"
                                               R"({"name":"IntALU","stage":"Execute","values":[3,4,5,6]},)"
                                               R"({"name":"InstQueue","stage":"Issue","values":[16,32,64]}]})");
  SyntheticOracle oracle(space, builtin_oracle_config("compute_bound"));
  PerfectPredictor perfect(space, oracle, identity_order(space, 3));
  const std::vector<Objective> objs(kAllObjectives.begin(), kAllObjectives.end());
  ExplorationConfig cfg;
  cfg.acquisition = Acquisition::kRandom;
  cfg.without_replacement = true;
  cfg.initial_samples = 1;
  cfg.eval_budget = 48;
  cfg.max_iterations = 1000;
  cfg.seed = 14;
  const auto r = random_search(space, perfect, oracle, cfg);
  std::set<std::vector<double>> want, got;
  const auto truth = true_front(space, oracle, objs);
  for (const auto& m : truth.members()) want.insert(m.objectives);
  for (const auto& m : r.predicted_front.members()) got.insert(m.objectives);
  EXPECT_EQ(got, want);
  EXPECT_EQ(r.stop_reason, "space_exhausted");
}

TEST(Explorer, ThreadCountDoesNotChangeResults) {
  Space4 s;
  SkewedPredictor skewed(s.perfect);
  ExplorationConfig cfg;
  cfg.seed = 15;
  cfg.threads = 1;
  const auto a = explore(s.space, skewed, s.oracle, cfg);
  cfg.threads = 5;
  const auto b = explore(s.space, skewed, s.oracle, cfg);
  ASSERT_EQ(a.candidates.size(), b.candidates.size());
  for (std::size_t i = 0; i < a.candidates.size(); ++i) EXPECT_EQ(a.candidates[i].candidate, b.candidates[i].candidate);
  EXPECT_EQ(a.iterations.back().phv, b.iterations.back().phv);
}

TEST(Explorer, IterationsToFraction) {
  std::vector<IterationRecord> flat(4);
  for (std::size_t i = 0; i < flat.size(); ++i) flat[i] = {i, std::nullopt, 0, 1, 0, 2.0};
  EXPECT_EQ(iterations_to_fraction(flat), 0u);
  std::vector<IterationRecord> rising = flat;
  rising[0].phv = 1.0;
  rising[1].phv = 1.5;
  rising[2].phv = 1.99;
  rising[3].phv = 2.0;
  EXPECT_EQ(iterations_to_fraction(rising), 2u);
  EXPECT_EQ(iterations_to_fraction(rising, 1.0), 3u);
  EXPECT_EQ(iterations_to_fraction(std::vector<IterationRecord>{}), 0u);
}

TEST(Explorer, ConfigValidation) {
  ExplorationConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.initial_samples = 0;
  EXPECT_THROW(cfg.validate(), InputError);
  cfg = ExplorationConfig{};
  cfg.objectives = {Objective::kIpc, Objective::kIpc};
  EXPECT_THROW(cfg.validate(), InputError);
  cfg = ExplorationConfig{};
  cfg.reference = {1.0, 2.0};
  EXPECT_THROW(cfg.validate(), InputError);
  EXPECT_THROW(parse_acquisition("greedy"), InputError);
  EXPECT_THROW(parse_direction_policy("sideways"), InputError);
  EXPECT_EQ(parse_acquisition(acquisition_name(Acquisition::kRandom)), Acquisition::kRandom);
}

TEST(Explorer, SurrogatePredictorChecksSlots) {
  const DesignSpace space = load_design_space(config_path("space4.json"));
  const auto order = identity_order(space, 3);
  SurrogateConfig c;
  c.embed_dim = 8;
  c.heads = 1;
  c.depth = 1;
  SurrogateModel ipc(space, order, c, Objective::kIpc), power(space, order, c, Objective::kPower),
      area(space, order, c, Objective::kArea);
  EXPECT_NO_THROW(SurrogatePredictor(ipc, power, area));
  EXPECT_THROW(SurrogatePredictor(power, ipc, area), CompatibilityError);
  SurrogateModel other(space, identity_order(space, 5), c, Objective::kArea);
  EXPECT_NO_THROW(SurrogatePredictor(ipc, power, other));
  auto swapped = order;
  std::swap(swapped.order[0], swapped.order[1]);
  SurrogateModel reordered(space, swapped, c, Objective::kArea);
  EXPECT_THROW(SurrogatePredictor(ipc, power, reordered), CompatibilityError);
}

TEST(Explorer, ParallelFor) {
  for (std::size_t threads : {1u, 2u, 7u, 64u}) {
    std::vector<int> hits(100, 0);
    parallel_for(hits.size(), threads, [&](std::size_t i) { hits[i] += 1; });
    EXPECT_EQ(std::count(hits.begin(), hits.end(), 1), 100);
  }
  EXPECT_THROW(parallel_for(10, 3, [](std::size_t i) {
                 if (i == 7) throw std::runtime_error("boom");
               }),
               std::runtime_error);
  std::atomic<int> calls{0};
  parallel_for(0, 4, [&](std::size_t) { ++calls; });
  EXPECT_EQ(calls.load(), 0);
}

}  // namespace
}  // namespace adse
