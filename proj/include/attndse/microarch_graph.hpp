// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "attndse/design_space.hpp"

namespace adse {

enum class EdgeKind { kInternal, kExternal };

struct GraphEdge {
  std::string a;
  std::string b;
  EdgeKind kind = EdgeKind::kInternal;
};

// Datapath graph of one pipeline stage. Internal edges join two vertices of
// the stage; external edges have exactly one endpoint here and lead to a
// parameter of another stage.
class PerceptualGraph {
 public:
  PerceptualGraph() = default;
  // Throws InputError on self-loops or edges that break the rules above.
  PerceptualGraph(std::string stage, std::vector<std::string> vertices, std::vector<GraphEdge> edges);

  const std::string& stage() const { return stage_; }
  const std::vector<std::string>& vertices() const { return vertices_; }
  const std::vector<GraphEdge>& edges() const { return edges_; }
  bool has_vertex(std::string_view v) const;

 private:
  std::string stage_;
  std::vector<std::string> vertices_;
  std::vector<GraphEdge> edges_;
};

// The whole-core fixture: every vertex with its stage plus labelled edges,
// and the pipeline order used to concatenate stages.
struct CoreGraph {
  struct Vertex {
    std::string name;
    std::string stage;
  };
  std::vector<Vertex> vertices;
  std::vector<GraphEdge> edges;
  std::vector<std::string> stage_order;

  // Splits into one PerceptualGraph per stage (stage_order order, empty
  // stages skipped).
  std::vector<PerceptualGraph> stage_graphs() const;
  // Induced subgraph on the given vertex names.
  CoreGraph restricted_to(std::span<const std::string> names) const;
  nlohmann::json to_json() const;
};

// JSON: {"stage_order": [...], "vertices": [{"vertex", "stage"}],
//        "edges": [{"a", "b", "label": "internal"|"external"}]}
CoreGraph parse_core_graph(std::string_view text);
CoreGraph load_core_graph(const std::string& path);

// Internal incident edges minus external incident edges. Throws InputError
// for an unknown vertex.
int perception_degree(const PerceptualGraph& g, std::string_view v);

// Orders a stage's parameters so the highest perception degrees sit in the
// middle: parameters are ranked by (degree desc, name asc) and inserted from
// the lowest rank up, each at position floor(len/2) of the current sequence.
std::vector<std::string> serialize_stage(const PerceptualGraph& g);

struct SerializationOrder {
  // order[s] = index (into the design space) of the parameter at sequence
  // position s.
  std::vector<std::size_t> order;
  // Odd, >= 3.
  std::size_t window_size = 3;
  // degrees[i] = perception degree of design-space parameter i.
  std::vector<int> degrees;

  // Inverse permutation: position of parameter i.
  std::vector<std::size_t> positions() const;
  nlohmann::json to_json() const;
  static SerializationOrder from_json(const nlohmann::json& j);
};

// max(degree, 0) rounded up to odd, floor 3.
std::size_t window_size_for_degree(int max_degree);

// Concatenates per-stage orderings in stage_order. Graph vertices absent from
// the space are ignored. Throws InputError when a space parameter appears in
// no graph or in more than one, or a graph stage is missing from stage_order.
SerializationOrder serialize_space(const DesignSpace& space, std::span<const PerceptualGraph> graphs,
                                   std::span<const std::string> stage_order);

// Convenience: restrict the core graph to the space and serialize.
SerializationOrder serialize_space(const DesignSpace& space, const CoreGraph& graph);

// Identity order with a given window (no graph available).
SerializationOrder identity_order(const DesignSpace& space, std::size_t window_size);

}  // namespace adse
