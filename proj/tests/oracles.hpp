#pragma once

// Independent oracles for property tests. These deliberately avoid the
// library's algorithms: d-separation by exhaustive path enumeration, MEU by
// plain odometer enumeration over a recursive evaluator.

#include <functional>
#include <random>

#include "voigraph/policy.hpp"
#include "voigraph/scm.hpp"
#include "voigraph/separation.hpp"

namespace voigraph::oracle {

inline std::vector<Path> all_simple_paths(const ScopedGraph& g, NodeId a, NodeId b) {
  std::vector<Path> out;
  std::vector<NodeId> cur{a};
  std::vector<char> used(g.size(), 0);
  used[a] = 1;
  std::function<void()> rec = [&]() {
    NodeId u = cur.back();
    if (u == b) {
      out.push_back(g.make_path(cur));
      return;
    }
    for (NodeId w = 0; w < g.size(); ++w) {
      if (used[w]) continue;
      if (!g.has_edge(u, w) && !g.has_edge(w, u)) continue;
      used[w] = 1;
      cur.push_back(w);
      rec();
      cur.pop_back();
      used[w] = 0;
    }
  };
  rec();
  return out;
}

// Clause-by-clause check of the d-separation definition on one path.
inline bool path_active(const ScopedGraph& g, const Path& p, const NodeSet& given) {
  if (given.count(p.vertices.front()) || given.count(p.vertices.back()))
    return false;
  for (std::size_t i = 1; i + 1 < p.vertices.size(); ++i) {
    NodeId v = p.vertices[i];
    if (p.shapes[i] == Shape::Collider) {
      bool activated = false;
      for (NodeId d : g.relatives(v, Relation::Descendants))
        if (given.count(d)) activated = true;
      if (!activated) return false;
    } else if (given.count(v)) {
      return false;
    }
  }
  return true;
}

inline bool d_separated_enum(const ScopedGraph& g, const NodeSet& sources,
                             const NodeSet& targets, const NodeSet& given) {
  for (NodeId a : sources) {
    if (given.count(a)) continue;
    for (NodeId b : targets) {
      if (given.count(b)) continue;
      if (a == b) return false;
      for (const Path& p : all_simple_paths(g, a, b))
        if (path_active(g, p, given)) return false;
    }
  }
  return true;
}

inline NodeSet ancestors_fixpoint(const ScopedGraph& g, NodeId v) {
  NodeSet out{v};
  for (;;) {
    NodeSet next = out;
    for (NodeId u : out)
      for (NodeId p : g.relatives(u, Relation::Parents)) next.insert(p);
    if (next == out) return out;
    out = next;
  }
}

// Recursive evaluation, memoized per call: independent of the engine's
// topological pass.
inline Value eval_recursive(const CompiledScm& c, const Policy& policy,
                            const std::vector<Value>& exo, std::size_t vi,
                            std::map<std::size_t, Value>& memo) {
  auto it = memo.find(vi);
  if (it != memo.end()) return it->second;
  const Variable& v = c.scm().variables[vi];
  Assignment a(c.scm().variables.size(), 0);
  for (const auto& p : v.parents) {
    std::size_t pi = c.var_index(p);
    a[pi] = eval_recursive(c, policy, exo, pi, memo);
  }
  Value out;
  if (v.kind == NodeKind::Decision) {
    std::size_t cell = c.context_cell(v.name, a);
    out = policy.rules.at(v.name).at(cell);
  } else {
    out = c.eval_function(vi, a, exo[vi]);
  }
  memo[vi] = out;
  return out;
}

inline Rational expected_utility_naive(const FiniteSCM& scm, const Scope& scope,
                                       const Policy& policy) {
  CompiledScm c(scm, scope);
  std::size_t uv = c.var_index(scm.utility_var().name);
  Rational total = 0;
  std::vector<Value> exo;
  Rational p;
  for (std::size_t k = 0; k < c.world_count(); ++k) {
    c.world(k, exo, p);
    std::map<std::size_t, Value> memo;
    Value y = eval_recursive(c, policy, exo, uv, memo);
    total += p * scm.utility_var().utility_values[y];
  }
  return total;
}

// Plain odometer over all deterministic policies; no reductions.
inline Rational meu_naive(const FiniteSCM& scm, const Scope& scope) {
  PolicyEnumerator en(scm, scope, BigInt(1) << 30);
  Policy pol;
  bool first = true;
  Rational best;
  while (en.next(pol)) {
    Rational v = expected_utility_naive(scm, scope, pol);
    if (first || v > best) best = v;
    first = false;
  }
  return best;
}

// Random scoped graph: nodes v0..v{n-1} in topological order, the last node
// is the utility; decisions drawn among the rest.
inline ScopedGraph random_graph(std::mt19937_64& rng, std::size_t n,
                                std::size_t max_decisions, int edge_pct = 40) {
  std::vector<std::pair<std::string, NodeKind>> nodes;
  std::vector<std::pair<std::string, std::string>> edges;
  std::map<std::string, std::vector<std::string>> contexts;
  auto name = [](std::size_t i) { return "v" + std::to_string(i); };
  std::vector<std::size_t> decision_ids;
  for (std::size_t i = 0; i + 1 < n; ++i) decision_ids.push_back(i);
  std::shuffle(decision_ids.begin(), decision_ids.end(), rng);
  std::size_t n_dec = 1 + rng() % max_decisions;
  decision_ids.resize(std::min(n_dec, decision_ids.size()));
  NodeSet dec_set(decision_ids.begin(), decision_ids.end());

  for (std::size_t i = 0; i < n; ++i) {
    NodeKind k = i + 1 == n            ? NodeKind::Utility
                 : dec_set.count(i)    ? NodeKind::Decision
                                       : NodeKind::Chance;
    nodes.emplace_back(name(i), k);
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (static_cast<int>(rng() % 100) < edge_pct)
        edges.emplace_back(name(i), name(j));
  for (std::size_t i : dec_set) {
    std::vector<std::string> ctx;
    for (const auto& [a, b] : edges)
      if (b == name(i)) ctx.push_back(a);
    contexts[name(i)] = ctx;
  }
  return ScopedGraph::build(std::move(nodes), std::move(edges),
                            std::move(contexts));
}

inline NodeSet random_subset(std::mt19937_64& rng, const ScopedGraph& g,
                             const NodeSet& exclude, int keep_pct = 30) {
  NodeSet out;
  for (NodeId v = 0; v < g.size(); ++v) {
    if (exclude.count(v)) continue;
    if (static_cast<int>(rng() % 100) < keep_pct) out.insert(v);
  }
  return out;
}

inline Policy random_policy(std::mt19937_64& rng, const FiniteSCM& scm,
                            const Scope& scope) {
  Policy pol;
  for (const auto& [dname, ctx] : scope.contexts) {
    std::size_t cells = 1;
    for (const auto& c : ctx) cells *= scm.var(c).card;
    auto& rule = pol.rules[dname];
    rule.resize(cells);
    for (auto& r : rule) r = rng() % scm.var(dname).card;
  }
  return pol;
}

}  // namespace voigraph::oracle
