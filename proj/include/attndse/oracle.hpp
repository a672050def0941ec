// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "attndse/design_space.hpp"

namespace adse {

// IPC is maximized; power (W) and area (mm^2) are minimized.
struct ObjectiveVector {
  double ipc = 0.0;
  double power = 0.0;
  double area = 0.0;

  friend bool operator==(const ObjectiveVector&, const ObjectiveVector&) = default;
};

enum class Objective { kIpc = 0, kPower = 1, kArea = 2 };

inline constexpr std::array<Objective, 3> kAllObjectives = {Objective::kIpc, Objective::kPower,
                                                            Objective::kArea};

std::string_view objective_name(Objective o);
Objective parse_objective(std::string_view name);
double objective_value(const ObjectiveVector& v, Objective o);
bool is_maximized(Objective o);

// Ground truth for the exploration loop. Every call to evaluate() is
// counted; the count is the exploration budget currency.
class Oracle {
 public:
  virtual ~Oracle() = default;

  ObjectiveVector evaluate(const DesignPoint& p) const {
    calls_.fetch_add(1, std::memory_order_relaxed);
    return evaluate_uncounted(p);
  }
  // Same value without touching the counter (reporting and test oracles).
  virtual ObjectiveVector evaluate_uncounted(const DesignPoint& p) const = 0;

  std::size_t calls() const { return calls_.load(std::memory_order_relaxed); }
  void reset_calls() { calls_.store(0, std::memory_order_relaxed); }

 private:
  mutable std::atomic<std::size_t> calls_{0};
};

// Throughput limiters of the synthetic core. IPC is the minimum of the
// group rates.
enum class ResourceGroup { kFrontend, kRename, kWindow, kExecute, kMemory, kCommit };
inline constexpr std::size_t kResourceGroupCount = 6;

std::string_view resource_group_name(ResourceGroup g);
// Group each modelled parameter belongs to.
ResourceGroup resource_group_of(std::string_view parameter);

struct WorkloadMix {
  double int_alu = 0.45;
  double int_mult_div = 0.08;
  double fp_alu = 0.15;
  double fp_mult_div = 0.06;
  double load = 0.18;
  double store = 0.08;
  double branch = 0.10;
};

// One named synthetic workload. Coefficient jitter is derived from `seed`.
struct OracleConfig {
  std::string name = "compute_bound";
  std::uint64_t seed = 1;
  WorkloadMix mix;
  double ilp = 8.0;               // IPC ceiling of the instruction window
  double window_scale = 48.0;     // window entries for 63% of the ceiling
  double icache_footprint_kb = 24.0;
  double dcache_footprint_kb = 24.0;
  double l2_footprint_kb = 192.0;
  double memory_latency_ns = 60.0;
  double branch_miss_base = 0.06;
  double mispredict_penalty = 14.0;
  // Value (or category label) of every parameter missing from the space.
  std::map<std::string, nlohmann::json> defaults;

  static OracleConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

OracleConfig load_oracle_config(const std::string& path);
// Built-in workloads: "compute_bound", "memory_bound", "branch_heavy".
OracleConfig builtin_oracle_config(std::string_view name);

struct OracleBreakdown {
  std::array<double, kResourceGroupCount> rates{};
  ResourceGroup binding = ResourceGroup::kFrontend;
  ObjectiveVector objectives;
};

// Min-of-saturating-rates performance model with affine/superlinear power
// and affine area (formulas in docs/oracle.md).
class SyntheticOracle final : public Oracle {
 public:
  // Throws InputError if the space has a parameter the model does not know.
  SyntheticOracle(const DesignSpace& space, OracleConfig cfg);

  ObjectiveVector evaluate_uncounted(const DesignPoint& p) const override;
  OracleBreakdown breakdown(const DesignPoint& p) const;
  ResourceGroup binding_group(const DesignPoint& p) const { return breakdown(p).binding; }

  const OracleConfig& config() const { return cfg_; }
  const DesignSpace& space() const { return space_; }

 private:
  struct Resolved;
  Resolved resolve(const DesignPoint& p) const;

  DesignSpace space_;
  OracleConfig cfg_;
  // Per modelled parameter: linear power, quadratic power, area coefficients
  // after jitter.
  std::vector<std::array<double, 3>> coeff_;
  // Model index of each space parameter, and the value of every modelled
  // parameter before the point's own values are applied.
  std::vector<std::size_t> space_model_index_;
  std::vector<double> base_values_;
};

// The modelled parameter names (configs/table1_space.json).
const std::vector<std::string>& modelled_parameters();

}  // namespace adse
