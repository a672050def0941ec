// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "attndse/attention.hpp"
#include "attndse/design_space.hpp"
#include "attndse/microarch_graph.hpp"
#include "attndse/oracle.hpp"
#include "attndse/pareto.hpp"
#include "attndse/rng.hpp"
#include "attndse/surrogate.hpp"

namespace adse {

// What the exploration loop needs from a model: objective predictions and a
// per-objective attention heatmap whose parameter columns follow order().
class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual std::vector<ObjectiveVector> predict(std::span<const DesignPoint> points) const = 0;
  virtual std::vector<AttentionHeatmap> heatmaps(std::span<const DesignPoint> points, Objective o) const = 0;
  virtual const SerializationOrder& order() const = 0;
};

// Three trained single-objective models sharing one serialization order.
class SurrogatePredictor final : public Predictor {
 public:
  // Throws CompatibilityError if the models disagree on order or objective.
  SurrogatePredictor(const SurrogateModel& ipc, const SurrogateModel& power, const SurrogateModel& area);

  std::vector<ObjectiveVector> predict(std::span<const DesignPoint> points) const override;
  std::vector<AttentionHeatmap> heatmaps(std::span<const DesignPoint> points, Objective o) const override;
  const SerializationOrder& order() const override { return models_[0]->order(); }

 private:
  std::array<const SurrogateModel*, 3> models_;
};

// Oracle-backed stand-in (uncounted calls). Each heatmap row is a softmax
// over per-parameter sensitivity: the objective change of the step ABA
// would take (growth for IPC, savings for power and area). The token
// column carries the mean logit.
class PerfectPredictor final : public Predictor {
 public:
  PerfectPredictor(const DesignSpace& space, const Oracle& oracle, SerializationOrder order,
                   double temperature = 0.25);

  std::vector<ObjectiveVector> predict(std::span<const DesignPoint> points) const override;
  std::vector<AttentionHeatmap> heatmaps(std::span<const DesignPoint> points, Objective o) const override;
  const SerializationOrder& order() const override { return order_; }

 private:
  const DesignSpace& space_;
  const Oracle& oracle_;
  SerializationOrder order_;
  double temperature_;
};

enum class Acquisition { kAba, kRandom };
std::string_view acquisition_name(Acquisition a);
Acquisition parse_acquisition(std::string_view name);

// How the heatmap's extremal column maps to a step direction.
enum class DirectionPolicy {
  kGrowIpcShrinkCost,  // IPC: argmin column, +1; power/area: argmax column, -1
  kAlwaysGrow,         // as above but every step is +1
};
std::string_view direction_policy_name(DirectionPolicy p);
DirectionPolicy parse_direction_policy(std::string_view name);

struct BottleneckDecision {
  std::size_t position = 0;   // serialized position (0-based, token excluded)
  std::size_t parameter = 0;  // index into the design space
  int direction = 1;
  bool fallback = false;      // degenerate heatmap, parameter drawn at random
};

// Column sums over the parameter columns. IPC picks the minimum sum, power
// and area the maximum; ties go to the lowest serialized position. When all
// sums are equal the parameter is drawn from `rng`.
BottleneckDecision bottleneck_analyze(const AttentionHeatmap& heatmap, Objective objective,
                                      const SerializationOrder& order, Rng& rng,
                                      DirectionPolicy policy = DirectionPolicy::kGrowIpcShrinkCost);
// Every serialized position ranked as bottleneck_analyze would pick them:
// the first entry equals its decision, later entries follow column sums
// (stable, lowest position first on ties). A degenerate heatmap yields a
// random permutation.
std::vector<BottleneckDecision> bottleneck_ranking(const AttentionHeatmap& heatmap, Objective objective,
                                                   const SerializationOrder& order, Rng& rng,
                                                   DirectionPolicy policy = DirectionPolicy::kGrowIpcShrinkCost);

struct ExplorationConfig {
  std::size_t initial_samples = 64;   // X_n
  std::size_t max_iterations = 100;   // I_max
  std::size_t eval_budget = 300;      // oracle calls
  std::uint64_t seed = 1;
  Acquisition acquisition = Acquisition::kAba;
  DirectionPolicy direction_policy = DirectionPolicy::kGrowIpcShrinkCost;
  std::vector<Objective> objectives{kAllObjectives.begin(), kAllObjectives.end()};
  // Reference point in the orientation of `objectives`; empty derives it
  // from the predicted objectives of the initial sample.
  std::vector<double> reference;
  // Random search only: draw candidates without replacement from the
  // enumerated space.
  bool without_replacement = false;
  // Verified members of Omega carry their oracle objectives instead of the
  // prediction.
  bool truth_feedback = true;
  // Worker threads for batched predictions (0 reads ATTN_DSE_THREADS).
  std::size_t threads = 0;

  void validate() const;
  nlohmann::json to_json() const;
};

// One candidate x' considered in an iteration.
struct CandidateRecord {
  std::size_t iteration = 0;
  std::string parent;            // key of x (empty for random candidates)
  std::optional<std::size_t> parameter;
  int direction = 0;
  std::size_t rank = 0;          // position of the step in the heatmap ranking
  bool fallback = false;
  bool at_boundary = false;      // step clamped, candidate discarded
  std::string candidate;         // key of x'
  ObjectiveVector predicted;
  bool accepted = false;         // pushed to Q (not dominated by the front)
  std::optional<ObjectiveVector> measured;  // oracle value when spent here
};

struct IterationRecord {
  std::size_t iteration = 0;
  std::optional<Objective> objective;  // heatmap objective (ABA)
  std::size_t queue_size = 0;
  std::size_t front_size = 0;
  std::size_t evaluations = 0;         // cumulative oracle calls
  double phv = 0.0;                    // of the verified front
};

struct ExplorationResult {
  ParetoSet predicted_front;           // the set Omega, predicted objectives
  ParetoSet verified_front;            // oracle objectives of verified members
  std::vector<CandidateRecord> candidates;
  std::vector<IterationRecord> iterations;
  std::vector<double> reference;
  std::size_t evaluations = 0;
  std::size_t reporting_calls = 0;     // uncounted re-scoring of the final front
  bool truncated = false;              // budget ran out while verifying
  // max_iterations, budget, neighborhood_exhausted (ABA: no member has an
  // untried step) or space_exhausted (random without replacement).
  std::string stop_reason;
  // Points measured with counted oracle calls.
  std::set<DesignPoint> verified;
  // Oracle objectives of every member of the final predicted front.
  std::map<DesignPoint, ObjectiveVector> final_scores;
};

// Predicted front from a random initial sample, then per iteration one
// heatmap-guided step from every front member: the highest-ranked column
// whose step stays inside the space and reaches an untried point.
// Candidates not dominated by the front join it and new members are
// verified by the oracle.
ExplorationResult explore(const DesignSpace& space, const Predictor& predictor, const Oracle& oracle,
                          const ExplorationConfig& cfg);
// Same loop with uniformly drawn candidates (as many per iteration as the
// front has members).
ExplorationResult random_search(const DesignSpace& space, const Predictor& predictor, const Oracle& oracle,
                                const ExplorationConfig& cfg);
// Dispatches on cfg.acquisition.
ExplorationResult run_exploration(const DesignSpace& space, const Predictor& predictor, const Oracle& oracle,
                                  const ExplorationConfig& cfg);

// First iteration whose PHV reaches `fraction` of the final PHV (0 for a
// constant curve).
std::size_t iterations_to_fraction(std::span<const IterationRecord> curve, double fraction = 0.99);

// Worker count: ATTN_DSE_THREADS if set and positive, else the hardware
// concurrency (at least 1).
std::size_t worker_threads();
// Runs fn(i) for i in [0, n) on up to `threads` workers.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn);

}  // namespace adse
