#include "voigraph/graph.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <sstream>

#include "json.hpp"

namespace voigraph {

using nlohmann::json;

ScopedGraph ScopedGraph::build(std::vector<std::pair<std::string, NodeKind>> nodes,
                               std::vector<std::pair<std::string, std::string>> edges,
                               std::map<std::string, std::vector<std::string>> contexts) {
  ScopedGraph g;
  std::sort(nodes.begin(), nodes.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i)
    require(nodes[i].first != nodes[i + 1].first, ErrorCode::SchemaError,
            "duplicate node name: " + nodes[i].first);

  std::size_t utility_count = 0;
  for (auto& [name, kind] : nodes) {
    require(!name.empty(), ErrorCode::SchemaError, "empty node name");
    g.names_.push_back(name);
    g.kinds_.push_back(kind);
    if (kind == NodeKind::Utility) {
      g.utility_ = static_cast<NodeId>(g.names_.size() - 1);
      ++utility_count;
    }
  }
  require(utility_count == 1, ErrorCode::MissingUtility,
          "graph must have exactly one utility node, found " +
              std::to_string(utility_count));

  const std::size_t n = g.names_.size();
  g.parents_.resize(n);
  g.children_.resize(n);
  for (auto& [from, to] : edges) {
    NodeId a = g.id(from), b = g.id(to);
    require(a != b, ErrorCode::CycleError, "self-loop on " + from);
    require(!g.edges_.count({a, b}), ErrorCode::SchemaError,
            "duplicate edge " + from + " -> " + to);
    g.edges_.insert({a, b});
    g.parents_[b].push_back(a);
    g.children_[a].push_back(b);
  }
  for (auto& v : g.parents_) std::sort(v.begin(), v.end());
  for (auto& v : g.children_) std::sort(v.begin(), v.end());

  require(g.children_[g.utility_].empty(), ErrorCode::SchemaError,
          "utility node has children");

  // Parents of each decision must exactly mirror its declared contexts.
  for (auto& [dname, ctx] : contexts) {
    NodeId x = g.id(dname);
    require(g.is_decision(x), ErrorCode::DecisionParentMismatch,
            "contexts declared for non-decision " + dname);
    std::vector<NodeId> declared;
    for (auto& c : ctx) declared.push_back(g.id(c));
    std::sort(declared.begin(), declared.end());
    require(std::adjacent_find(declared.begin(), declared.end()) == declared.end(),
            ErrorCode::SchemaError, "duplicate context for " + dname);
    require(declared == g.parents_[x], ErrorCode::DecisionParentMismatch,
            "edges into decision " + dname + " do not mirror its contexts");
  }
  for (NodeId v = 0; v < n; ++v) {
    if (!g.is_decision(v)) continue;
    require(contexts.count(g.names_[v]) > 0, ErrorCode::DecisionParentMismatch,
            "decision " + g.names_[v] + " missing a contexts entry");
  }
  require(!g.is_decision(g.utility_), ErrorCode::SchemaError,
          "utility node cannot be a decision");

  if (g.one_topological_order().empty() && n > 0)
    fail(ErrorCode::CycleError, "graph is cyclic");
  return g;
}

NodeId ScopedGraph::id(const std::string& name) const {
  auto it = std::lower_bound(names_.begin(), names_.end(), name);
  require(it != names_.end() && *it == name, ErrorCode::UnknownNode,
          "unknown node: " + name);
  return static_cast<NodeId>(it - names_.begin());
}

bool ScopedGraph::has(const std::string& name) const {
  auto it = std::lower_bound(names_.begin(), names_.end(), name);
  return it != names_.end() && *it == name;
}

bool ScopedGraph::has_edge(NodeId a, NodeId b) const {
  return edges_.count({a, b}) > 0;
}

const std::vector<NodeId>& ScopedGraph::contexts(NodeId x) const {
  require(is_decision(x), ErrorCode::NotAContext,
          name(x) + " is not a decision");
  return parents_[x];
}

std::vector<NodeId> ScopedGraph::decisions() const {
  std::vector<NodeId> out;
  for (NodeId v = 0; v < size(); ++v)
    if (is_decision(v)) out.push_back(v);
  return out;
}

NodeSet ScopedGraph::contexts_of(const NodeSet& xs) const {
  NodeSet out;
  for (NodeId x : xs)
    for (NodeId c : contexts(x)) out.insert(c);
  return out;
}

NodeSet ScopedGraph::relatives(NodeId v, Relation rel) const {
  require(v < size(), ErrorCode::UnknownNode, "node id out of range");
  NodeSet out;
  switch (rel) {
    case Relation::Parents:
      out.insert(parents_[v].begin(), parents_[v].end());
      return out;
    case Relation::Children:
      out.insert(children_[v].begin(), children_[v].end());
      return out;
    case Relation::Ancestors:
    case Relation::Descendants: {
      // Reflexive, per the convention that Anc/Desc include the node itself.
      const bool up = rel == Relation::Ancestors;
      std::deque<NodeId> work{v};
      out.insert(v);
      while (!work.empty()) {
        NodeId u = work.front();
        work.pop_front();
        for (NodeId w : up ? parents_[u] : children_[u])
          if (out.insert(w).second) work.push_back(w);
      }
      return out;
    }
  }
  return out;
}

bool ScopedGraph::is_ancestor_of(NodeId a, NodeId b) const {
  return relatives(a, Relation::Descendants).count(b) > 0;
}

std::optional<Path> ScopedGraph::directed_path(NodeId a, NodeId b) const {
  return directed_path_avoiding(a, b, {});
}

std::optional<Path> ScopedGraph::directed_path_avoiding(
    NodeId a, NodeId b, const NodeSet& forbidden) const {
  require(a < size() && b < size(), ErrorCode::UnknownNode, "node id out of range");
  // BFS; children are sorted, so the first path found is the lexicographic
  // least among shortest ones.
  std::vector<NodeId> pred(size(), size());
  std::vector<char> seen(size(), 0);
  std::deque<NodeId> work{a};
  seen[a] = 1;
  if (a == b) return make_path({a});
  while (!work.empty()) {
    NodeId u = work.front();
    work.pop_front();
    for (NodeId w : children_[u]) {
      if (seen[w]) continue;
      if (w != b && forbidden.count(w)) continue;
      seen[w] = 1;
      pred[w] = u;
      if (w == b) {
        std::vector<NodeId> rev{b};
        for (NodeId x = b; x != a; x = pred[x]) rev.push_back(pred[x]);
        std::reverse(rev.begin(), rev.end());
        return make_path(rev);
      }
      work.push_back(w);
    }
  }
  return std::nullopt;
}

std::vector<std::vector<NodeId>> ScopedGraph::topological_orders(
    std::size_t limit) const {
  std::vector<std::vector<NodeId>> out;
  std::vector<std::size_t> indeg(size(), 0);
  for (NodeId v = 0; v < size(); ++v) indeg[v] = parents_[v].size();
  std::vector<NodeId> cur;
  std::function<void()> rec = [&]() {
    if (out.size() >= limit) return;
    if (cur.size() == size()) {
      out.push_back(cur);
      return;
    }
    for (NodeId v = 0; v < size(); ++v) {
      if (indeg[v] != 0 || std::find(cur.begin(), cur.end(), v) != cur.end())
        continue;
      cur.push_back(v);
      for (NodeId w : children_[v]) --indeg[w];
      rec();
      for (NodeId w : children_[v]) ++indeg[w];
      cur.pop_back();
      if (out.size() >= limit) return;
    }
  };
  rec();
  return out;
}

std::vector<NodeId> ScopedGraph::one_topological_order() const {
  std::vector<std::size_t> indeg(size(), 0);
  for (NodeId v = 0; v < size(); ++v) indeg[v] = parents_[v].size();
  std::vector<NodeId> order;
  std::deque<NodeId> ready;
  for (NodeId v = 0; v < size(); ++v)
    if (indeg[v] == 0) ready.push_back(v);
  while (!ready.empty()) {
    NodeId v = ready.front();
    ready.pop_front();
    order.push_back(v);
    for (NodeId w : children_[v])
      if (--indeg[w] == 0) ready.push_back(w);
  }
  if (order.size() != size()) return {};
  return order;
}

Path ScopedGraph::make_path(const std::vector<NodeId>& vertices) const {
  Path p;
  p.vertices = vertices;
  p.shapes.assign(vertices.size(), Shape::Endpoint);
  NodeSet seen;
  for (NodeId v : vertices)
    require(seen.insert(v).second, ErrorCode::InternalAssertion,
            "path repeats vertex " + name(v));
  for (std::size_t i = 0; i + 1 < vertices.size(); ++i)
    require(has_edge(vertices[i], vertices[i + 1]) ||
                has_edge(vertices[i + 1], vertices[i]),
            ErrorCode::InternalAssertion, "path vertices not adjacent");
  for (std::size_t i = 1; i + 1 < vertices.size(); ++i) {
    bool in_left = has_edge(vertices[i - 1], vertices[i]);
    bool in_right = has_edge(vertices[i + 1], vertices[i]);
    p.shapes[i] = in_left && in_right ? Shape::Collider
                  : !in_left && !in_right ? Shape::Fork
                                          : Shape::Chain;
  }
  return p;
}

std::string ScopedGraph::path_str(const Path& p) const {
  std::ostringstream os;
  for (std::size_t i = 0; i < p.vertices.size(); ++i) {
    if (i > 0)
      os << (has_edge(p.vertices[i - 1], p.vertices[i]) ? " -> " : " <- ");
    os << name(p.vertices[i]);
  }
  return os.str();
}

NodeSet ScopedGraph::node_set(std::initializer_list<const char*> names) const {
  NodeSet out;
  for (const char* n : names) out.insert(id(n));
  return out;
}

ScopedGraph parse_scoped_graph(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::SchemaError, std::string("bad JSON: ") + e.what());
  }
  require(doc.is_object() && doc.contains("nodes") && doc.contains("edges") &&
              doc.contains("contexts") && doc.contains("utility"),
          ErrorCode::SchemaError,
          "graph document needs nodes/edges/contexts/utility");

  std::vector<std::pair<std::string, NodeKind>> nodes;
  for (auto& n : doc["nodes"]) {
    require(n.contains("name") && n.contains("kind"), ErrorCode::SchemaError,
            "node entry needs name and kind");
    std::string kind = n["kind"];
    NodeKind k = kind == "chance"     ? NodeKind::Chance
                 : kind == "decision" ? NodeKind::Decision
                 : kind == "utility"  ? NodeKind::Utility
                                      : (fail(ErrorCode::SchemaError,
                                              "bad node kind: " + kind),
                                         NodeKind::Chance);
    nodes.emplace_back(n["name"].get<std::string>(), k);
  }
  require(!nodes.empty(), ErrorCode::MissingUtility, "empty node list");

  std::vector<std::pair<std::string, std::string>> edges;
  for (auto& e : doc["edges"]) {
    require(e.is_array() && e.size() == 2, ErrorCode::SchemaError,
            "edge entries are [from,to] pairs");
    edges.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
  }

  std::map<std::string, std::vector<std::string>> contexts;
  for (auto& [k, v] : doc["contexts"].items()) {
    std::vector<std::string> ctx;
    for (auto& c : v) ctx.push_back(c.get<std::string>());
    contexts[k] = ctx;
  }

  ScopedGraph g = ScopedGraph::build(std::move(nodes), std::move(edges),
                                     std::move(contexts));
  NodeId u = g.id(doc["utility"].get<std::string>());
  require(u == g.utility(), ErrorCode::SchemaError,
          "declared utility does not match the utility-kind node");
  return g;
}

std::string scoped_graph_to_json(const ScopedGraph& g) {
  json doc;
  doc["nodes"] = json::array();
  for (NodeId v = 0; v < g.size(); ++v) {
    const char* kind = g.kind(v) == NodeKind::Chance     ? "chance"
                       : g.kind(v) == NodeKind::Decision ? "decision"
                                                         : "utility";
    doc["nodes"].push_back({{"name", g.name(v)}, {"kind", kind}});
  }
  doc["edges"] = json::array();
  for (NodeId v = 0; v < g.size(); ++v)
    for (NodeId w : g.children(v))
      doc["edges"].push_back({g.name(v), g.name(w)});
  doc["contexts"] = json::object();
  for (NodeId x : g.decisions()) {
    json ctx = json::array();
    for (NodeId c : g.contexts(x)) ctx.push_back(g.name(c));
    doc["contexts"][g.name(x)] = ctx;
  }
  doc["utility"] = g.name(g.utility());
  return doc.dump(2);
}

}  // namespace voigraph
