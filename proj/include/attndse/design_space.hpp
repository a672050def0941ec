// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "attndse/rng.hpp"

namespace adse {

// Pipeline-stage labels used to group parameters.
inline constexpr std::string_view kStageLabels[] = {
    "Fetch", "BranchPred", "Decode", "Rename", "Dispatch",
    "Issue", "Execute",    "Memory", "Cache",  "Commit",
};

bool is_stage_label(std::string_view s);

// "start:end:stride"; end is included when reachable by whole strides.
struct GridSpec {
  double start = 0.0;
  double end = 0.0;
  double stride = 1.0;
};

struct ParameterSpec {
  std::string name;
  std::string stage;
  // Numeric candidates in strictly increasing order. Categorical parameters
  // use 0, 1, 2, ... here and carry their names in `labels`.
  std::vector<double> values;
  std::vector<std::string> labels;
  bool categorical = false;
  std::optional<GridSpec> grid;  // set when declared as "a:b:c"

  std::size_t cardinality() const { return values.size(); }
  // Printable form of candidate i.
  std::string label(std::size_t i) const;
};

// Expands "a:b:c" into its candidate list. Throws InputError on a malformed
// spec (bad syntax, stride <= 0, start > end).
std::vector<double> expand_grid(const GridSpec& g);
GridSpec parse_grid(std::string_view text);

// One concrete configuration: an index into each parameter's candidate list.
struct DesignPoint {
  std::vector<std::uint32_t> indices;

  friend bool operator==(const DesignPoint&, const DesignPoint&) = default;
  friend auto operator<=>(const DesignPoint&, const DesignPoint&) = default;
  // Dash-separated indices, e.g. "3-0-11".
  std::string key() const;
};

class DesignSpace {
 public:
  DesignSpace() = default;
  // Validates names and candidate lists; throws InputError.
  DesignSpace(std::string name, std::vector<ParameterSpec> params);

  const std::string& name() const { return name_; }
  const std::vector<ParameterSpec>& params() const { return params_; }
  std::size_t size() const { return params_.size(); }
  const ParameterSpec& param(std::size_t i) const { return params_[i]; }
  std::optional<std::size_t> index_of(std::string_view name) const;

  // Exact product of cardinalities. Throws std::overflow_error past 2^128-1.
  unsigned __int128 total_size() const;
  std::string total_size_string() const;

  bool contains(const DesignPoint& p) const;
  void validate(const DesignPoint& p) const;  // throws InputError

  // Feature vector x: the candidate value of every parameter.
  std::vector<double> encode(const DesignPoint& p) const;
  // Inverse of encode; throws InputError when a value is not a candidate.
  DesignPoint decode(std::span<const double> values) const;

  // The space restricted to the named parameters, in this space's order.
  DesignSpace subspace(std::span<const std::string> names, std::string name) const;

  nlohmann::json to_json() const;

 private:
  std::string name_;
  std::vector<ParameterSpec> params_;
};

// Parses the JSON design-space document (see configs/table1_space.json).
DesignSpace parse_design_space(std::string_view config_text);
DesignSpace load_design_space(const std::string& path);

// n points, each index uniform and independent per parameter.
std::vector<DesignPoint> random_sample(const DesignSpace& space, std::size_t n, std::uint64_t seed);

// Every point of the space in mixed-radix order (last parameter fastest).
// Throws InputError if the space has more than `limit` points.
std::vector<DesignPoint> enumerate_space(const DesignSpace& space, std::size_t limit = 1'000'000);

struct StepResult {
  DesignPoint point;
  bool at_boundary = false;  // the step was clamped; point equals the input
};

// Moves one parameter by exactly one candidate-list position.
StepResult step_parameter(const DesignSpace& space, const DesignPoint& p, std::size_t index,
                          int direction);

}  // namespace adse
