#pragma once

#include <optional>

#include "voigraph/graph.hpp"

namespace voigraph {

/// Query endpoint: a graph node, or the virtual policy node pi_X of a
/// decision X. Policy nodes are never materialized in the graph; they act as
/// a fresh parentless parent of their decision for the duration of a query.
struct QueryNode {
  NodeId node;
  bool policy = false;

  static QueryNode real(NodeId v) { return {v, false}; }
  static QueryNode pi(NodeId x) { return {x, true}; }
  bool operator<(const QueryNode& o) const {
    return policy != o.policy ? policy < o.policy : node < o.node;
  }
};

struct SeparationQuery {
  std::vector<QueryNode> sources;
  std::vector<QueryNode> targets;
  NodeSet given;
};

/// True iff every path between sources and targets is blocked by `given`.
/// Endpoints lying inside `given` are blocked outright (clause 3 of the
/// d-separation definition), so overlapping queries are legal.
bool d_separated(const ScopedGraph& g, const SeparationQuery& q);

bool d_separated(const ScopedGraph& g, const NodeSet& sources,
                 const NodeSet& targets, const NodeSet& given);

/// Least fixpoint of w under "add every decision whose full context set is
/// already included". The utility node is accepted and treated as a plain
/// node if present in w.
NodeSet closure(const ScopedGraph& g, const NodeSet& w);

/// Shortest active path between a and b given the conditioning set,
/// lexicographic tie-break; absent when d-separated.
std::optional<Path> active_path_witness(const ScopedGraph& g, NodeId a, NodeId b,
                                        const NodeSet& given);

/// Checks a concrete path against the d-separation clauses: no endpoint or
/// non-collider in `given`; every collider has a descendant in `given`.
bool is_active_path(const ScopedGraph& g, const Path& p, const NodeSet& given);

/// True iff pi_X is d-connected to the utility node given the set.
bool policy_relevance(const ScopedGraph& g, NodeId x, const NodeSet& given);

}  // namespace voigraph
