// SPDX-License-Identifier: Apache-2.0
#include "attndse/explorer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <numeric>
#include <set>
#include <thread>

#include "attndse/error.hpp"

namespace adse {
namespace {

int step_direction(Objective o, DirectionPolicy policy) {
  if (policy == DirectionPolicy::kAlwaysGrow) return 1;
  return o == Objective::kIpc ? 1 : -1;
}

// Splits `points` into contiguous chunks and evaluates them on workers;
// results keep the input order.
template <typename T, typename Fn>
std::vector<T> chunked(std::span<const DesignPoint> points, std::size_t threads, Fn fn) {
  const std::size_t n = points.size();
  const std::size_t chunks = std::max<std::size_t>(1, std::min(threads, n));
  std::vector<std::vector<T>> parts(chunks);
  parallel_for(chunks, chunks, [&](std::size_t c) {
    const std::size_t lo = n * c / chunks, hi = n * (c + 1) / chunks;
    parts[c] = fn(points.subspan(lo, hi - lo));
  });
  std::vector<T> out;
  out.reserve(n);
  for (auto& p : parts)
    for (auto& v : p) out.push_back(std::move(v));
  return out;
}

}  // namespace

SurrogatePredictor::SurrogatePredictor(const SurrogateModel& ipc, const SurrogateModel& power,
                                       const SurrogateModel& area)
    : models_{&ipc, &power, &area} {
  for (std::size_t i = 0; i < 3; ++i) {
    if (models_[i]->objective() != kAllObjectives[i])
      throw CompatibilityError("predictor slot " + std::string(objective_name(kAllObjectives[i])) +
                               " holds a model trained for " +
                               std::string(objective_name(models_[i]->objective())));
    if (models_[i]->order().order != models_[0]->order().order ||
        models_[i]->parameter_names() != models_[0]->parameter_names())
      throw CompatibilityError("surrogate models disagree on the parameter order");
  }
}

std::vector<ObjectiveVector> SurrogatePredictor::predict(std::span<const DesignPoint> points) const {
  const auto ipc = models_[0]->predict(points);
  const auto power = models_[1]->predict(points);
  const auto area = models_[2]->predict(points);
  std::vector<ObjectiveVector> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) out[i] = {ipc[i], power[i], area[i]};
  return out;
}

std::vector<AttentionHeatmap> SurrogatePredictor::heatmaps(std::span<const DesignPoint> points,
                                                           Objective o) const {
  auto preds = models_[static_cast<std::size_t>(o)]->predict_with_heatmaps(points);
  std::vector<AttentionHeatmap> out;
  out.reserve(preds.size());
  for (auto& p : preds) out.push_back(std::move(p.heatmap));
  return out;
}

PerfectPredictor::PerfectPredictor(const DesignSpace& space, const Oracle& oracle, SerializationOrder order,
                                   double temperature)
    : space_(space), oracle_(oracle), order_(std::move(order)), temperature_(temperature) {
  if (order_.order.size() != space_.size())
    throw InputError("perfect predictor: order does not cover the space");
  if (!(temperature_ > 0.0)) throw InputError("perfect predictor: temperature must be positive");
}

std::vector<ObjectiveVector> PerfectPredictor::predict(std::span<const DesignPoint> points) const {
  std::vector<ObjectiveVector> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(oracle_.evaluate_uncounted(p));
  return out;
}

std::vector<AttentionHeatmap> PerfectPredictor::heatmaps(std::span<const DesignPoint> points,
                                                         Objective o) const {
  const std::size_t L = order_.order.size();
  const std::size_t n = L + 1;
  const int dir = step_direction(o, DirectionPolicy::kGrowIpcShrinkCost);
  std::vector<AttentionHeatmap> out;
  for (const auto& p : points) {
    const double base = objective_value(oracle_.evaluate_uncounted(p), o);
    // Improvement of the step ABA would take at each position.
    std::vector<double> gain(L, 0.0);
    double largest = 0.0;
    for (std::size_t s = 0; s < L; ++s) {
      const auto step = step_parameter(space_, p, order_.order[s], dir);
      if (step.at_boundary) continue;
      const double v = objective_value(oracle_.evaluate_uncounted(step.point), o);
      gain[s] = is_maximized(o) ? v - base : base - v;
      largest = std::max(largest, std::abs(gain[s]));
    }
    // IPC reads the smallest column as the bottleneck, cost objectives the
    // largest, so the sign of the logit follows the objective.
    std::vector<double> logits(n, 0.0);
    double mean = 0.0;
    for (std::size_t s = 0; s < L; ++s) {
      const double g = largest > 0.0 ? gain[s] / largest : 0.0;
      logits[s + 1] = (is_maximized(o) ? -g : g) / temperature_;
      mean += logits[s + 1];
    }
    logits[0] = L > 0 ? mean / static_cast<double>(L) : 0.0;
    const double mx = *std::max_element(logits.begin(), logits.end());
    std::vector<double> row(n);
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) total += row[j] = std::exp(logits[j] - mx);
    for (double& r : row) r /= total;
    AttentionHeatmap h{n, std::vector<double>(n * n)};
    for (std::size_t i = 0; i < n; ++i) std::copy(row.begin(), row.end(), h.weights.begin() + i * n);
    out.push_back(std::move(h));
  }
  return out;
}

std::string_view acquisition_name(Acquisition a) { return a == Acquisition::kAba ? "aba" : "random"; }

Acquisition parse_acquisition(std::string_view name) {
  if (name == "aba") return Acquisition::kAba;
  if (name == "random") return Acquisition::kRandom;
  throw InputError("unknown acquisition '" + std::string(name) + "' (expected aba or random)");
}

std::string_view direction_policy_name(DirectionPolicy p) {
  return p == DirectionPolicy::kGrowIpcShrinkCost ? "grow_ipc_shrink_cost" : "always_grow";
}

DirectionPolicy parse_direction_policy(std::string_view name) {
  if (name == "grow_ipc_shrink_cost") return DirectionPolicy::kGrowIpcShrinkCost;
  if (name == "always_grow") return DirectionPolicy::kAlwaysGrow;
  throw InputError("unknown direction policy '" + std::string(name) + "'");
}

BottleneckDecision bottleneck_analyze(const AttentionHeatmap& heatmap, Objective objective,
                                      const SerializationOrder& order, Rng& rng, DirectionPolicy policy) {
  const auto sums = heatmap.parameter_column_sums();
  if (sums.empty() || sums.size() != order.order.size())
    throw InputError("bottleneck_analyze: heatmap has " + std::to_string(sums.size()) +
                     " parameter columns, order has " + std::to_string(order.order.size()));
  BottleneckDecision d;
  d.direction = step_direction(objective, policy);
  const auto lo = std::min_element(sums.begin(), sums.end());
  const auto hi = std::max_element(sums.begin(), sums.end());
  if (*hi - *lo <= 1e-12 * std::max(1.0, std::abs(*hi))) {
    d.fallback = true;
    d.position = static_cast<std::size_t>(uniform_index(rng, sums.size()));
  } else {
    // min_element / max_element return the first extremum: lowest position.
    d.position = static_cast<std::size_t>((is_maximized(objective) ? lo : hi) - sums.begin());
  }
  d.parameter = order.order[d.position];
  return d;
}

std::vector<BottleneckDecision> bottleneck_ranking(const AttentionHeatmap& heatmap, Objective objective,
                                                   const SerializationOrder& order, Rng& rng,
                                                   DirectionPolicy policy) {
  const auto first = bottleneck_analyze(heatmap, objective, order, rng, policy);
  const auto sums = heatmap.parameter_column_sums();
  std::vector<std::size_t> pos(sums.size());
  std::iota(pos.begin(), pos.end(), std::size_t{0});
  if (first.fallback) {
    shuffle(pos.begin(), pos.end(), rng);
    std::iter_swap(pos.begin(), std::find(pos.begin(), pos.end(), first.position));
  } else {
    const bool ascending = is_maximized(objective);
    std::stable_sort(pos.begin(), pos.end(), [&](std::size_t a, std::size_t b) {
      return ascending ? sums[a] < sums[b] : sums[a] > sums[b];
    });
  }
  std::vector<BottleneckDecision> out;
  for (std::size_t p : pos) {
    BottleneckDecision d = first;
    d.position = p;
    d.parameter = order.order[p];
    out.push_back(d);
  }
  return out;
}

void ExplorationConfig::validate() const {
  if (initial_samples == 0) throw InputError("exploration: initial_samples must be at least 1");
  if (objectives.empty()) throw InputError("exploration: no objectives");
  for (std::size_t i = 0; i < objectives.size(); ++i)
    for (std::size_t j = i + 1; j < objectives.size(); ++j)
      if (objectives[i] == objectives[j]) throw InputError("exploration: objective listed twice");
  if (!reference.empty() && reference.size() != objectives.size())
    throw InputError("exploration: reference point has the wrong dimension");
}

nlohmann::json ExplorationConfig::to_json() const {
  std::vector<std::string> objs;
  for (Objective o : objectives) objs.emplace_back(objective_name(o));
  return {{"initial_samples", initial_samples},
          {"max_iterations", max_iterations},
          {"eval_budget", eval_budget},
          {"seed", seed},
          {"acquisition", std::string(acquisition_name(acquisition))},
          {"direction_policy", std::string(direction_policy_name(direction_policy))},
          {"objectives", objs},
          {"reference", reference},
          {"without_replacement", without_replacement},
          {"truth_feedback", truth_feedback}};
}

namespace {

ExplorationResult run_loop(const DesignSpace& space, const Predictor& predictor, const Oracle& oracle,
                           const ExplorationConfig& cfg, Acquisition acq) {
  cfg.validate();
  const std::size_t threads = cfg.threads ? cfg.threads : worker_threads();
  const Orientation orient = orientation_for(cfg.objectives);
  const auto proj = [&](const ObjectiveVector& v) { return project(v, cfg.objectives); };
  const auto predict = [&](std::span<const DesignPoint> pts) {
    return chunked<ObjectiveVector>(pts, threads, [&](auto c) { return predictor.predict(c); });
  };

  ExplorationResult r;
  r.predicted_front = ParetoSet(orient);
  r.verified_front = ParetoSet(orient);
  Rng rng(mix_seed(cfg.seed, 0xab));

  const auto initial = random_sample(space, cfg.initial_samples, mix_seed(cfg.seed, 1));
  const auto initial_pred = predict(initial);
  std::vector<std::vector<double>> initial_proj;
  for (std::size_t i = 0; i < initial.size(); ++i) {
    initial_proj.push_back(proj(initial_pred[i]));
    r.predicted_front.insert(initial[i], initial_proj.back());
  }
  r.reference = cfg.reference.empty() ? reference_point(initial_proj, orient) : cfg.reference;

  const std::size_t calls_before = oracle.calls();
  std::map<DesignPoint, ObjectiveVector> truth;
  // Verifies every unverified front member; false once the budget is spent.
  const auto verify_front = [&]() -> std::vector<DesignPoint> {
    std::vector<DesignPoint> spent;
    for (const auto& m : r.predicted_front.sorted_members()) {
      if (truth.count(m.point)) continue;
      if (r.evaluations >= cfg.eval_budget) {
        r.truncated = true;
        break;
      }
      const ObjectiveVector v = oracle.evaluate(m.point);
      ++r.evaluations;
      truth[m.point] = v;
      r.verified.insert(m.point);
      r.verified_front.insert(m.point, proj(v));
      spent.push_back(m.point);
    }
    if (cfg.truth_feedback && !spent.empty()) {
      std::vector<ParetoMember> all = r.predicted_front.members();
      for (auto& m : all)
        if (auto t = truth.find(m.point); t != truth.end()) m.objectives = proj(t->second);
      r.predicted_front = pareto_filter(all, orient);
    }
    return spent;
  };
  const auto record_iteration = [&](std::size_t it, std::optional<Objective> o, std::size_t q) {
    r.iterations.push_back({it, o, q, r.predicted_front.size(), r.evaluations,
                            hypervolume_clipped(r.verified_front, r.reference)});
  };

  verify_front();
  record_iteration(0, std::nullopt, 0);

  std::set<DesignPoint> tried(initial.begin(), initial.end());
  std::vector<DesignPoint> pool;
  std::size_t pool_next = 0;
  if (acq == Acquisition::kRandom && cfg.without_replacement) {
    pool = enumerate_space(space);
    shuffle(pool.begin(), pool.end(), rng);
  }

  r.stop_reason = "max_iterations";
  for (std::size_t it = 1; it <= cfg.max_iterations; ++it) {
    if (r.truncated || r.evaluations >= cfg.eval_budget) {
      r.stop_reason = "budget";
      break;
    }
    std::optional<Objective> objective;
    std::vector<CandidateRecord> recs;
    std::vector<DesignPoint> cand;
    const auto members = r.predicted_front.sorted_members();
    if (acq == Acquisition::kAba) {
      objective = cfg.objectives[(it - 1) % cfg.objectives.size()];
      std::vector<DesignPoint> parents;
      for (const auto& m : members) parents.push_back(m.point);
      const auto maps = chunked<AttentionHeatmap>(
          parents, threads, [&](auto c) { return predictor.heatmaps(c, *objective); });
      for (std::size_t i = 0; i < parents.size(); ++i) {
        const auto ranking =
            bottleneck_ranking(maps[i], *objective, predictor.order(), rng, cfg.direction_policy);
        CandidateRecord rec;
        rec.iteration = it;
        rec.parent = parents[i].key();
        std::optional<DesignPoint> chosen;
        for (std::size_t k = 0; k < ranking.size() && !chosen; ++k) {
          const auto& d = ranking[k];
          const auto step = step_parameter(space, parents[i], d.parameter, d.direction);
          if (k == 0 || (!step.at_boundary && !tried.count(step.point))) {
            rec.parameter = d.parameter;
            rec.direction = d.direction;
            rec.rank = k;
            rec.fallback = d.fallback;
            rec.at_boundary = step.at_boundary;
            rec.candidate = step.point.key();
          }
          if (!step.at_boundary && !tried.count(step.point)) chosen = step.point;
        }
        if (!chosen) rec.at_boundary = true;
        recs.push_back(rec);
        if (chosen) {
          tried.insert(*chosen);
          cand.push_back(std::move(*chosen));
        }
      }
    } else {
      const std::size_t m = std::max<std::size_t>(1, members.size());
      for (std::size_t i = 0; i < m; ++i) {
        DesignPoint p;
        if (cfg.without_replacement) {
          if (pool_next >= pool.size()) break;
          p = pool[pool_next++];
        } else {
          p.indices.resize(space.size());
          for (std::size_t j = 0; j < space.size(); ++j)
            p.indices[j] = static_cast<std::uint32_t>(uniform_index(rng, space.param(j).cardinality()));
        }
        CandidateRecord rec;
        rec.iteration = it;
        rec.candidate = p.key();
        recs.push_back(rec);
        cand.push_back(std::move(p));
      }
      if (cand.empty()) {
        r.stop_reason = "space_exhausted";
        break;
      }
    }

    const auto preds = predict(cand);
    std::vector<std::pair<DesignPoint, std::vector<double>>> queue;
    std::size_t ci = 0;
    for (std::size_t i = 0; i < recs.size(); ++i) {
      if (recs[i].at_boundary) continue;
      recs[i].predicted = preds[ci];
      auto objs = proj(preds[ci]);
      if (cfg.truth_feedback)
        if (auto t = truth.find(cand[ci]); t != truth.end()) objs = proj(t->second);
      if (!r.predicted_front.contains_point(cand[ci]) && r.predicted_front.would_expand(objs)) {
        recs[i].accepted = true;
        queue.emplace_back(cand[ci], std::move(objs));
      }
      ++ci;
    }
    for (auto& [p, objs] : queue) r.predicted_front.insert(p, std::move(objs));
    const auto spent = verify_front();
    for (const auto& p : spent) {
      const std::string key = p.key();
      for (auto& rec : recs)
        if (rec.candidate == key && !rec.measured && !rec.at_boundary) {
          rec.measured = truth[p];
          break;
        }
    }
    for (auto& rec : recs) r.candidates.push_back(std::move(rec));
    record_iteration(it, objective, queue.size());

    // No member has an untried step left: later iterations would repeat
    // this one.
    if (acq == Acquisition::kAba && cand.empty()) {
      r.stop_reason = "neighborhood_exhausted";
      break;
    }
  }
  if (r.truncated) r.stop_reason = "budget";

  if (oracle.calls() - calls_before != r.evaluations)
    throw std::logic_error("exploration: oracle call accounting mismatch");
  for (const auto& m : r.predicted_front.members()) {
    if (auto it = truth.find(m.point); it != truth.end()) {
      r.final_scores[m.point] = it->second;
    } else {
      r.final_scores[m.point] = oracle.evaluate_uncounted(m.point);
      ++r.reporting_calls;
    }
  }
  return r;
}

}  // namespace

ExplorationResult explore(const DesignSpace& space, const Predictor& predictor, const Oracle& oracle,
                          const ExplorationConfig& cfg) {
  return run_loop(space, predictor, oracle, cfg, Acquisition::kAba);
}

ExplorationResult random_search(const DesignSpace& space, const Predictor& predictor, const Oracle& oracle,
                                const ExplorationConfig& cfg) {
  return run_loop(space, predictor, oracle, cfg, Acquisition::kRandom);
}

ExplorationResult run_exploration(const DesignSpace& space, const Predictor& predictor, const Oracle& oracle,
                                  const ExplorationConfig& cfg) {
  return cfg.acquisition == Acquisition::kAba ? explore(space, predictor, oracle, cfg)
                                              : random_search(space, predictor, oracle, cfg);
}

std::size_t iterations_to_fraction(std::span<const IterationRecord> curve, double fraction) {
  if (curve.empty()) return 0;
  const double target = fraction * curve.back().phv;
  for (const auto& rec : curve)
    if (rec.phv >= target) return rec.iteration;
  return curve.back().iteration;
}

std::size_t worker_threads() {
  if (const char* env = std::getenv("ATTN_DSE_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min(std::max<std::size_t>(threads, 1), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace adse
