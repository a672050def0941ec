// SPDX-License-Identifier: Apache-2.0
#include "attndse/microarch_graph.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "attndse/error.hpp"
#include "attndse/io.hpp"

namespace adse {
namespace {

std::string_view kind_name(EdgeKind k) { return k == EdgeKind::kInternal ? "internal" : "external"; }

}  // namespace

PerceptualGraph::PerceptualGraph(std::string stage, std::vector<std::string> vertices,
                                 std::vector<GraphEdge> edges)
    : stage_(std::move(stage)), vertices_(std::move(vertices)), edges_(std::move(edges)) {
  std::set<std::string> uniq(vertices_.begin(), vertices_.end());
  if (uniq.size() != vertices_.size()) throw InputError("stage " + stage_ + ": duplicate vertex");
  for (const auto& e : edges_) {
    if (e.a == e.b) throw InputError("stage " + stage_ + ": self-loop on '" + e.a + "'");
    const int inside = static_cast<int>(has_vertex(e.a)) + static_cast<int>(has_vertex(e.b));
    if (e.kind == EdgeKind::kInternal && inside != 2)
      throw InputError("stage " + stage_ + ": internal edge " + e.a + "-" + e.b +
                       " must join two vertices of the stage");
    if (e.kind == EdgeKind::kExternal && inside != 1)
      throw InputError("stage " + stage_ + ": external edge " + e.a + "-" + e.b +
                       " must have exactly one endpoint in the stage");
  }
}

bool PerceptualGraph::has_vertex(std::string_view v) const {
  return std::find(vertices_.begin(), vertices_.end(), v) != vertices_.end();
}

std::vector<PerceptualGraph> CoreGraph::stage_graphs() const {
  std::vector<PerceptualGraph> out;
  for (const auto& stage : stage_order) {
    std::vector<std::string> vs;
    std::set<std::string> in_stage;
    for (const auto& v : vertices)
      if (v.stage == stage) {
        vs.push_back(v.name);
        in_stage.insert(v.name);
      }
    if (vs.empty()) continue;
    std::vector<GraphEdge> es;
    for (const auto& e : edges)
      if (in_stage.count(e.a) || in_stage.count(e.b)) es.push_back(e);
    out.emplace_back(stage, std::move(vs), std::move(es));
  }
  return out;
}

CoreGraph CoreGraph::restricted_to(std::span<const std::string> names) const {
  const std::set<std::string> keep(names.begin(), names.end());
  CoreGraph g;
  g.stage_order = stage_order;
  for (const auto& v : vertices)
    if (keep.count(v.name)) g.vertices.push_back(v);
  for (const auto& e : edges)
    if (keep.count(e.a) && keep.count(e.b)) g.edges.push_back(e);
  return g;
}

nlohmann::json CoreGraph::to_json() const {
  nlohmann::json vs = nlohmann::json::array(), es = nlohmann::json::array();
  for (const auto& v : vertices) vs.push_back({{"vertex", v.name}, {"stage", v.stage}});
  for (const auto& e : edges) es.push_back({{"a", e.a}, {"b", e.b}, {"label", kind_name(e.kind)}});
  return {{"stage_order", stage_order}, {"vertices", vs}, {"edges", es}};
}

CoreGraph parse_core_graph(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("graph: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("vertices") || !doc.contains("edges"))
    throw InputError("graph: expected an object with 'vertices' and 'edges'");
  CoreGraph g;
  if (doc.contains("stage_order")) {
    g.stage_order = doc["stage_order"].get<std::vector<std::string>>();
  } else {
    g.stage_order.assign(std::begin(kStageLabels), std::end(kStageLabels));
  }
  std::map<std::string, std::string> stage_of;
  for (const auto& v : doc["vertices"]) {
    CoreGraph::Vertex vx{v.at("vertex").get<std::string>(), v.at("stage").get<std::string>()};
    if (!stage_of.emplace(vx.name, vx.stage).second)
      throw InputError("graph: vertex '" + vx.name + "' listed twice");
    if (std::find(g.stage_order.begin(), g.stage_order.end(), vx.stage) == g.stage_order.end())
      throw InputError("graph: vertex '" + vx.name + "' has stage '" + vx.stage +
                       "' missing from stage_order");
    g.vertices.push_back(std::move(vx));
  }
  for (const auto& e : doc["edges"]) {
    GraphEdge edge{e.at("a").get<std::string>(), e.at("b").get<std::string>(), EdgeKind::kInternal};
    const std::string label = e.at("label").get<std::string>();
    if (label == "external")
      edge.kind = EdgeKind::kExternal;
    else if (label != "internal")
      throw InputError("graph: edge label must be internal or external, got '" + label + "'");
    if (!stage_of.count(edge.a) || !stage_of.count(edge.b))
      throw InputError("graph: edge " + edge.a + "-" + edge.b + " references an unknown vertex");
    if (edge.a == edge.b) throw InputError("graph: self-loop on '" + edge.a + "'");
    const bool same = stage_of[edge.a] == stage_of[edge.b];
    if (same != (edge.kind == EdgeKind::kInternal))
      throw InputError("graph: edge " + edge.a + "-" + edge.b + " is labelled " + label +
                       " but its endpoints are " + (same ? "in the same stage" : "in different stages"));
    g.edges.push_back(std::move(edge));
  }
  return g;
}

CoreGraph load_core_graph(const std::string& path) { return parse_core_graph(read_file(path)); }

int perception_degree(const PerceptualGraph& g, std::string_view v) {
  if (!g.has_vertex(v))
    throw InputError("vertex '" + std::string(v) + "' not in stage " + g.stage());
  int d = 0;
  for (const auto& e : g.edges()) {
    if (e.a != v && e.b != v) continue;
    d += e.kind == EdgeKind::kInternal ? 1 : -1;
  }
  return d;
}

std::vector<std::string> serialize_stage(const PerceptualGraph& g) {
  struct Ranked {
    int degree;
    std::string name;
  };
  std::vector<Ranked> ranked;
  for (const auto& v : g.vertices()) ranked.push_back({perception_degree(g, v), v});
  std::sort(ranked.begin(), ranked.end(), [](const Ranked& x, const Ranked& y) {
    return x.degree != y.degree ? x.degree > y.degree : x.name < y.name;
  });
  std::vector<std::string> seq;
  seq.reserve(ranked.size());
  for (auto it = ranked.rbegin(); it != ranked.rend(); ++it)
    seq.insert(seq.begin() + static_cast<std::ptrdiff_t>(seq.size() / 2), it->name);
  return seq;
}

std::vector<std::size_t> SerializationOrder::positions() const {
  std::vector<std::size_t> pos(order.size());
  for (std::size_t s = 0; s < order.size(); ++s) pos[order[s]] = s;
  return pos;
}

nlohmann::json SerializationOrder::to_json() const {
  return {{"order", order}, {"window_size", window_size}, {"degrees", degrees}};
}

SerializationOrder SerializationOrder::from_json(const nlohmann::json& j) {
  SerializationOrder o;
  o.order = j.at("order").get<std::vector<std::size_t>>();
  o.window_size = j.at("window_size").get<std::size_t>();
  o.degrees = j.at("degrees").get<std::vector<int>>();
  return o;
}

std::size_t window_size_for_degree(int max_degree) {
  std::size_t w = static_cast<std::size_t>(std::max(max_degree, 0));
  if (w % 2 == 0) ++w;
  return std::max<std::size_t>(w, 3);
}

SerializationOrder serialize_space(const DesignSpace& space, std::span<const PerceptualGraph> graphs,
                                   std::span<const std::string> stage_order) {
  std::vector<int> owner(space.size(), -1);
  for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
    if (std::find(stage_order.begin(), stage_order.end(), graphs[gi].stage()) == stage_order.end())
      throw InputError("stage '" + graphs[gi].stage() + "' missing from the stage order");
    for (const auto& v : graphs[gi].vertices()) {
      const auto idx = space.index_of(v);
      if (!idx) continue;
      if (owner[*idx] != -1) throw InputError("parameter '" + v + "' appears in two stage graphs");
      owner[*idx] = static_cast<int>(gi);
    }
  }
  for (std::size_t i = 0; i < space.size(); ++i)
    if (owner[i] == -1) throw InputError("parameter '" + space.param(i).name + "' is in no stage graph");

  SerializationOrder out;
  out.degrees.assign(space.size(), 0);
  int max_degree = 0;
  for (const auto& stage : stage_order) {
    for (const auto& g : graphs) {
      if (g.stage() != stage) continue;
      for (const auto& v : serialize_stage(g)) {
        const auto idx = space.index_of(v);
        if (!idx) continue;
        out.order.push_back(*idx);
        out.degrees[*idx] = perception_degree(g, v);
        max_degree = std::max(max_degree, out.degrees[*idx]);
      }
    }
  }
  out.window_size = window_size_for_degree(max_degree);
  return out;
}

SerializationOrder serialize_space(const DesignSpace& space, const CoreGraph& graph) {
  std::vector<std::string> names;
  for (const auto& p : space.params()) names.push_back(p.name);
  const CoreGraph sub = graph.restricted_to(names);
  const auto graphs = sub.stage_graphs();
  return serialize_space(space, graphs, sub.stage_order);
}

SerializationOrder identity_order(const DesignSpace& space, std::size_t window_size) {
  SerializationOrder o;
  for (std::size_t i = 0; i < space.size(); ++i) o.order.push_back(i);
  o.degrees.assign(space.size(), 0);
  o.window_size = window_size;
  return o;
}

}  // namespace adse
