#include "voigraph/separation.hpp"

#include <algorithm>
#include <deque>
#include <functional>

namespace voigraph {

namespace {

// Internal node numbering for queries: real nodes keep their ids, policy
// nodes of decision X map to size()+X. A policy node's only edge is pi_X -> X.
struct QueryGraph {
  const ScopedGraph& g;
  std::vector<char> has_pi;

  explicit QueryGraph(const ScopedGraph& graph, const SeparationQuery& q)
      : g(graph), has_pi(graph.size(), 0) {
    for (const auto& s : q.sources)
      if (s.policy) mark(s);
    for (const auto& t : q.targets)
      if (t.policy) mark(t);
  }
  void mark(const QueryNode& n) {
    require(g.is_decision(n.node), ErrorCode::UnknownNode,
            "policy node requested for non-decision " + g.name(n.node));
    has_pi[n.node] = 1;
  }
  std::uint32_t encode(const QueryNode& n) const {
    return n.policy ? static_cast<std::uint32_t>(g.size()) + n.node : n.node;
  }
  bool is_pi(std::uint32_t v) const { return v >= g.size(); }
  std::uint32_t total() const { return 2 * static_cast<std::uint32_t>(g.size()); }

  template <typename F>
  void for_parents(std::uint32_t v, F&& f) const {
    if (is_pi(v)) return;  // policy nodes are parentless
    for (NodeId p : g.parents(v)) f(static_cast<std::uint32_t>(p));
    if (has_pi[v]) f(static_cast<std::uint32_t>(g.size()) + v);
  }
  template <typename F>
  void for_children(std::uint32_t v, F&& f) const {
    if (is_pi(v)) {
      f(v - static_cast<std::uint32_t>(g.size()));
      return;
    }
    for (NodeId c : g.children(v)) f(static_cast<std::uint32_t>(c));
  }
};

}  // namespace

bool d_separated(const ScopedGraph& g, const SeparationQuery& q) {
  for (const auto& n : q.sources)
    require(n.node < g.size(), ErrorCode::UnknownNode, "bad source node");
  for (const auto& n : q.targets)
    require(n.node < g.size(), ErrorCode::UnknownNode, "bad target node");
  for (NodeId v : q.given)
    require(v < g.size(), ErrorCode::UnknownNode, "bad conditioning node");

  QueryGraph qg(g, q);
  auto in_given = [&](std::uint32_t v) {
    return !qg.is_pi(v) && q.given.count(v) > 0;
  };

  // Ancestors of the conditioning set, for collider activation.
  std::vector<char> anc_given(qg.total(), 0);
  {
    std::deque<std::uint32_t> work;
    for (NodeId v : q.given) {
      anc_given[v] = 1;
      work.push_back(v);
    }
    while (!work.empty()) {
      std::uint32_t v = work.front();
      work.pop_front();
      qg.for_parents(v, [&](std::uint32_t p) {
        if (!anc_given[p]) {
          anc_given[p] = 1;
          work.push_back(p);
        }
      });
    }
  }

  std::vector<char> is_target(qg.total(), 0);
  for (const auto& t : q.targets) {
    std::uint32_t v = qg.encode(t);
    if (!in_given(v)) is_target[v] = 1;
  }

  // Reachability over (node, arrival-direction) states. "in" = the last edge
  // points into the node; "out" = it points out of the node.
  enum Dir { In = 0, Out = 1 };
  std::vector<char> visited(2 * qg.total(), 0);
  std::deque<std::pair<std::uint32_t, Dir>> work;
  bool connected = false;
  auto push = [&](std::uint32_t v, Dir d) {
    if (is_target[v]) connected = true;
    if (!visited[2 * v + d]) {
      visited[2 * v + d] = 1;
      work.emplace_back(v, d);
    }
  };

  for (const auto& s : q.sources) {
    std::uint32_t v = qg.encode(s);
    if (in_given(v)) continue;  // endpoint in the set: every path blocked
    if (is_target[v]) return false;
    // A source may leave in any direction; expand like an Out-state visit.
    qg.for_parents(v, [&](std::uint32_t p) { push(p, Out); });
    qg.for_children(v, [&](std::uint32_t c) { push(c, In); });
  }

  while (!work.empty() && !connected) {
    auto [v, d] = work.front();
    work.pop_front();
    if (d == In) {
      if (anc_given[v])  // collider continuation
        qg.for_parents(v, [&](std::uint32_t p) { push(p, Out); });
      if (!in_given(v))  // chain continuation
        qg.for_children(v, [&](std::uint32_t c) { push(c, In); });
    } else {
      if (!in_given(v)) {
        qg.for_parents(v, [&](std::uint32_t p) { push(p, Out); });
        qg.for_children(v, [&](std::uint32_t c) { push(c, In); });
      }
    }
  }
  return !connected;
}

bool d_separated(const ScopedGraph& g, const NodeSet& sources,
                 const NodeSet& targets, const NodeSet& given) {
  SeparationQuery q;
  for (NodeId v : sources) q.sources.push_back(QueryNode::real(v));
  for (NodeId v : targets) q.targets.push_back(QueryNode::real(v));
  q.given = given;
  return d_separated(g, q);
}

NodeSet closure(const ScopedGraph& g, const NodeSet& w) {
  for (NodeId v : w)
    require(v < g.size(), ErrorCode::UnknownNode, "bad node in closure input");
  NodeSet out = w;
  bool changed = true;
  while (changed) {
    changed = false;
    for (NodeId x : g.decisions()) {
      if (out.count(x)) continue;
      const auto& ctx = g.contexts(x);
      if (std::all_of(ctx.begin(), ctx.end(),
                      [&](NodeId c) { return out.count(c) > 0; })) {
        out.insert(x);
        changed = true;
      }
    }
  }
  return out;
}

bool is_active_path(const ScopedGraph& g, const Path& p, const NodeSet& given) {
  if (p.vertices.empty()) return false;
  if (given.count(p.vertices.front()) || given.count(p.vertices.back()))
    return false;
  for (std::size_t i = 1; i + 1 < p.vertices.size(); ++i) {
    NodeId v = p.vertices[i];
    if (p.shapes[i] == Shape::Collider) {
      NodeSet desc = g.relatives(v, Relation::Descendants);
      bool activated = std::any_of(desc.begin(), desc.end(),
                                   [&](NodeId d) { return given.count(d) > 0; });
      if (!activated) return false;
    } else if (given.count(v)) {
      return false;
    }
  }
  return true;
}

std::optional<Path> active_path_witness(const ScopedGraph& g, NodeId a, NodeId b,
                                        const NodeSet& given) {
  require(a < g.size() && b < g.size(), ErrorCode::UnknownNode, "bad endpoint");
  require(!given.count(a) && !given.count(b), ErrorCode::PreconditionViolated,
          "witness endpoints must lie outside the conditioning set");
  if (a == b) return std::nullopt;

  // Iterative deepening with lexicographic neighbor expansion: the first hit
  // is the shortest active path, ties broken lexicographically.
  std::vector<char> anc_given(g.size(), 0);
  for (NodeId v : given)
    for (NodeId u : g.relatives(v, Relation::Ancestors)) anc_given[u] = 1;

  std::vector<NodeId> cur{a};
  std::vector<char> used(g.size(), 0);
  used[a] = 1;
  std::optional<Path> found;

  std::function<void(std::size_t)> dfs = [&](std::size_t budget) {
    if (found) return;
    NodeId u = cur.back();
    std::vector<NodeId> nbrs;
    for (NodeId w : g.parents(u)) nbrs.push_back(w);
    for (NodeId w : g.children(u)) nbrs.push_back(w);
    std::sort(nbrs.begin(), nbrs.end());
    for (NodeId w : nbrs) {
      if (found) return;
      if (used[w]) continue;
      // Local blocking check at u once its successor is known.
      if (cur.size() >= 2) {
        NodeId prev = cur[cur.size() - 2];
        bool in_left = g.has_edge(prev, u), in_right = g.has_edge(w, u);
        bool collider = in_left && in_right;
        if (collider ? !anc_given[u] : given.count(u) > 0) continue;
      }
      if (w == b) {
        if (!given.count(b)) found = g.make_path([&] {
          auto v = cur;
          v.push_back(w);
          return v;
        }());
        continue;
      }
      if (cur.size() >= budget) continue;
      used[w] = 1;
      cur.push_back(w);
      dfs(budget);
      cur.pop_back();
      used[w] = 0;
    }
  };
  for (std::size_t budget = 1; budget <= g.size() && !found; ++budget)
    dfs(budget);
  return found;
}

bool policy_relevance(const ScopedGraph& g, NodeId x, const NodeSet& given) {
  require(g.is_decision(x), ErrorCode::NotAContext,
          g.name(x) + " is not a decision");
  SeparationQuery q;
  q.sources.push_back(QueryNode::pi(x));
  q.targets.push_back(QueryNode::real(g.utility()));
  q.given = given;
  return !d_separated(g, q);
}

}  // namespace voigraph
