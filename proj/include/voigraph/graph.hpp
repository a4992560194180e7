#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "voigraph/errors.hpp"

namespace voigraph {

// Nodes are interned as indices into a name table sorted lexicographically,
// so index order doubles as the tie-breaking order used everywhere.
using NodeId = std::uint32_t;
using NodeSet = std::set<NodeId>;

enum class NodeKind : std::uint8_t { Chance, Decision, Utility };

enum class Shape : std::uint8_t { Endpoint, Chain, Fork, Collider };

enum class Relation : std::uint8_t { Parents, Children, Ancestors, Descendants };

/// A simple path; vertices consecutive-adjacent, no repeats. Shapes are the
/// local orientation at each position (endpoints marked Endpoint).
struct Path {
  std::vector<NodeId> vertices;
  std::vector<Shape> shapes;

  std::size_t length() const { return vertices.empty() ? 0 : vertices.size() - 1; }
  bool operator==(const Path& o) const { return vertices == o.vertices; }
};

/// DAG over chance/decision/utility nodes with per-decision context sets.
/// Invariant: for every decision X, parents(X) == contexts(X) exactly.
/// Immutable after construction; all operations on it are pure.
class ScopedGraph {
 public:
  static ScopedGraph build(std::vector<std::pair<std::string, NodeKind>> nodes,
                           std::vector<std::pair<std::string, std::string>> edges,
                           std::map<std::string, std::vector<std::string>> contexts);

  std::size_t size() const { return names_.size(); }
  const std::string& name(NodeId v) const { return names_.at(v); }
  NodeId id(const std::string& name) const;
  bool has(const std::string& name) const;
  NodeKind kind(NodeId v) const { return kinds_.at(v); }
  bool is_decision(NodeId v) const { return kind(v) == NodeKind::Decision; }
  NodeId utility() const { return utility_; }

  const std::vector<NodeId>& parents(NodeId v) const { return parents_.at(v); }
  const std::vector<NodeId>& children(NodeId v) const { return children_.at(v); }
  bool has_edge(NodeId a, NodeId b) const;

  /// Contexts of a decision (== its parents, by the scoped-graph invariant).
  const std::vector<NodeId>& contexts(NodeId x) const;
  std::vector<NodeId> decisions() const;
  /// Union of context sets over a set of decisions.
  NodeSet contexts_of(const NodeSet& xs) const;

  NodeSet relatives(NodeId v, Relation rel) const;
  bool is_ancestor_of(NodeId a, NodeId b) const;  // reflexive

  /// Shortest directed path a -> b, ties broken lexicographically by
  /// successor; absent when b is unreachable.
  std::optional<Path> directed_path(NodeId a, NodeId b) const;

  /// Shortest directed path a -> b whose vertices avoid `forbidden`
  /// (endpoints exempt). Used for control-path construction.
  std::optional<Path> directed_path_avoiding(NodeId a, NodeId b,
                                             const NodeSet& forbidden) const;

  /// Distinct topological orders, lexicographic enumeration, up to limit.
  std::vector<std::vector<NodeId>> topological_orders(std::size_t limit) const;
  std::vector<NodeId> one_topological_order() const;

  Path make_path(const std::vector<NodeId>& vertices) const;
  std::string path_str(const Path& p) const;
  NodeSet node_set(std::initializer_list<const char*> names) const;

 private:
  std::vector<std::string> names_;
  std::vector<NodeKind> kinds_;
  std::vector<std::vector<NodeId>> parents_;   // sorted
  std::vector<std::vector<NodeId>> children_;  // sorted
  std::set<std::pair<NodeId, NodeId>> edges_;
  NodeId utility_ = 0;
};

/// Parses the scoped-graph JSON document (schema in README). Bit-exact
/// contract: edges into decisions must exactly mirror "contexts".
ScopedGraph parse_scoped_graph(const std::string& text);
std::string scoped_graph_to_json(const ScopedGraph& g);

}  // namespace voigraph
