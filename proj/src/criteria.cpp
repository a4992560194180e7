#include "voigraph/criteria.hpp"

#include <algorithm>
#include <deque>
#include <functional>

namespace voigraph {

namespace {

NodeSet set_minus(const NodeSet& a, const NodeSet& b) {
  NodeSet out;
  for (NodeId v : a)
    if (!b.count(v)) out.insert(v);
  return out;
}

NodeSet set_union(const NodeSet& a, const NodeSet& b) {
  NodeSet out = a;
  out.insert(b.begin(), b.end());
  return out;
}

NodeSet set_intersect(const NodeSet& a, const NodeSet& b) {
  NodeSet out;
  for (NodeId v : a)
    if (b.count(v)) out.insert(v);
  return out;
}

NodeSet derived_contexts(const ScopedGraph& g, const NodeSet& xs, const NodeSet& z) {
  return set_minus(set_minus(g.contexts_of(xs), xs), z);
}

}  // namespace

bool Thm1Report::all() const {
  for (const auto& [k, v] : a)
    if (!v) return false;
  for (const auto& [k, v] : b)
    if (!v) return false;
  for (const auto& [k, v] : c)
    if (!v) return false;
  return true;
}

NodeSet thm1_condition_c_set(const ScopedGraph& g, NodeId z) {
  NodeSet base;
  for (NodeId x : g.decisions()) {
    base.insert(x);
    if (x == z) continue;  // C_{X(S) \ {z}} drops z's own contexts
    for (NodeId c : g.contexts(x)) base.insert(c);
  }
  base.erase(z);
  return closure(g, base);
}

SingleDecisionVerdict single_decision_criterion(const ScopedGraph& g, NodeId x,
                                                NodeId z) {
  require(g.is_decision(x), ErrorCode::NotAContext,
          g.name(x) + " is not a decision");
  const auto& ctx = g.contexts(x);
  require(std::find(ctx.begin(), ctx.end(), z) != ctx.end(),
          ErrorCode::NotAContext,
          g.name(z) + " is not a context of " + g.name(x));
  if (!g.is_ancestor_of(x, g.utility()))
    return SingleDecisionVerdict::Immaterial;
  NodeSet given{x};
  for (NodeId c : ctx)
    if (c != z) given.insert(c);
  if (d_separated(g, {z}, {g.utility()}, given))
    return SingleDecisionVerdict::Immaterial;
  return SingleDecisionVerdict::PossiblyMaterial;
}

std::optional<std::vector<NodeId>> solubility(const ScopedGraph& g) {
  std::vector<NodeId> decisions = g.decisions();
  std::sort(decisions.begin(), decisions.end());
  NodeId y = g.utility();
  NodeSet anc_y = g.relatives(y, Relation::Ancestors);

  auto valid = [&](const std::vector<NodeId>& order) {
    for (std::size_t i = 0; i < order.size(); ++i) {
      NodeSet given{order[i]};
      for (NodeId c : g.contexts(order[i])) given.insert(c);
      for (std::size_t j = 0; j < i; ++j) {
        NodeSet earlier{order[j]};
        for (NodeId c : g.contexts(order[j])) earlier.insert(c);
        for (NodeId v : earlier) {
          if (!anc_y.count(v)) continue;
          if (!d_separated(g, {v}, {y}, given)) return false;
        }
      }
    }
    return true;
  };

  // Decision counts are desk-scale; permutations in lexicographic order.
  std::vector<NodeId> perm = decisions;
  do {
    if (valid(perm)) return perm;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return std::nullopt;
}

Thm1Report thm1_conditions(const ScopedGraph& g) {
  Thm1Report r;
  NodeId y = g.utility();
  for (NodeId x : g.decisions()) {
    r.a[x] = g.is_ancestor_of(x, y);
    for (NodeId z : g.contexts(x)) {
      NodeSet given{x};
      for (NodeId c : g.contexts(x))
        if (c != z) given.insert(c);
      r.b[{x, z}] = !d_separated(g, {z}, {y}, given);
      r.c[{x, z}] = policy_relevance(g, x, thm1_condition_c_set(g, z));
    }
  }
  return r;
}

OrderingGraph build_ordering_graph(const ScopedGraph& g,
                                   const NodeSet& target_decisions,
                                   const NodeSet& z) {
  for (NodeId x : target_decisions)
    require(g.is_decision(x), ErrorCode::PreconditionViolated,
            g.name(x) + " is not a decision");
  require(set_intersect(z, target_decisions).empty(),
          ErrorCode::PreconditionViolated, "Z must be disjoint from X'");

  OrderingGraph h;
  NodeSet cprime = derived_contexts(g, target_decisions, z);
  NodeSet verts = set_union(set_union(z, target_decisions), cprime);
  h.vertices.assign(verts.begin(), verts.end());

  for (NodeId x : target_decisions) {
    for (NodeId p : g.contexts(x))
      if (verts.count(p)) h.edges.insert({p, x});
    for (NodeId d : g.relatives(x, Relation::Descendants))
      if (d != x && verts.count(d)) h.edges.insert({x, d});
  }
  for (const auto& [a, b] : h.edges) h.successors[a].push_back(b);
  for (auto& [v, succ] : h.successors) std::sort(succ.begin(), succ.end());
  return h;
}

namespace {

// Enumerates topological orders of an OrderingGraph lexicographically,
// invoking fn on each; fn returns true to stop. Returns the number of
// orders visited.
std::size_t for_each_topological_order(
    const OrderingGraph& h, std::size_t budget,
    const std::function<bool(const std::vector<NodeId>&)>& fn) {
  std::map<NodeId, std::size_t> indeg;
  for (NodeId v : h.vertices) indeg[v] = 0;
  for (const auto& [a, b] : h.edges) ++indeg[b];
  std::vector<NodeId> cur;
  NodeSet used;
  std::size_t visited = 0;
  bool stop = false;

  std::function<void()> rec = [&]() {
    if (stop || visited >= budget) return;
    if (cur.size() == h.vertices.size()) {
      ++visited;
      if (fn(cur)) stop = true;
      return;
    }
    for (NodeId v : h.vertices) {
      if (stop || visited >= budget) return;
      if (used.count(v) || indeg[v] != 0) continue;
      used.insert(v);
      cur.push_back(v);
      auto it = h.successors.find(v);
      if (it != h.successors.end())
        for (NodeId w : it->second) --indeg[w];
      rec();
      if (it != h.successors.end())
        for (NodeId w : it->second) ++indeg[w];
      cur.pop_back();
      used.erase(v);
    }
  };
  rec();
  return visited;
}

bool condition_one_holds(const ScopedGraph& g, const NodeSet& target_decisions,
                         const NodeSet& cprime) {
  SeparationQuery q;
  for (NodeId x : target_decisions) q.sources.push_back(QueryNode::pi(x));
  q.targets.push_back(QueryNode::real(g.utility()));
  q.given = closure(g, set_union(target_decisions, cprime));
  return d_separated(g, q);
}

// Condition II for one C under an ordering prefix, with the policy-node term
// dropped (provably redundant) and U' empty.
bool condition_two_holds_at(const ScopedGraph& g, NodeId c,
                            const NodeSet& z_before, const NodeSet& xc_before) {
  if (z_before.empty()) return true;
  return d_separated(g, {c}, z_before, closure(g, xc_before));
}

}  // namespace

std::optional<FactorizationWitness> lb_factorizable(const ScopedGraph& g,
                                                    const NodeSet& target_decisions,
                                                    const NodeSet& z,
                                                    const CriteriaOptions& opt) {
  NodeSet cprime = derived_contexts(g, target_decisions, z);
  require(set_intersect(z, set_union(cprime, target_decisions)).empty(),
          ErrorCode::PreconditionViolated, "Z overlaps X' or C'");
  // Z must subsume the contexts left over once C' and X' are removed; with
  // C' derived as C_{X'} \ (X' u Z) this holds by construction, but callers
  // may hand us inconsistent sets.
  NodeSet leftover = set_minus(g.contexts_of(target_decisions),
                               set_union(cprime, target_decisions));
  require(set_minus(leftover, z).empty(), ErrorCode::PreconditionViolated,
          "Z does not subsume the remaining contexts of X'");

  if (!condition_one_holds(g, target_decisions, cprime)) return std::nullopt;

  OrderingGraph h = build_ordering_graph(g, target_decisions, z);
  std::optional<FactorizationWitness> found;
  std::size_t visited = for_each_topological_order(
      h, opt.ordering_budget, [&](const std::vector<NodeId>& order) {
        NodeSet z_before, xc_before;
        for (NodeId v : order) {
          if (cprime.count(v) &&
              !condition_two_holds_at(g, v, z_before, xc_before))
            return false;
          if (z.count(v)) z_before.insert(v);
          if (target_decisions.count(v) || cprime.count(v)) xc_before.insert(v);
        }
        FactorizationWitness w;
        w.target_decisions = target_decisions;
        w.z = z;
        w.derived_contexts = cprime;
        w.ordering = order;
        found = w;
        return true;
      });
  if (!found && visited >= opt.ordering_budget)
    fail(ErrorCode::SearchBudgetExceeded,
         "ordering search budget exhausted without a witness");
  return found;
}

ExtractedPaths extract_paths_from_nonfactorizability(const ScopedGraph& g,
                                                     NodeId z0,
                                                     const NodeSet& target_decisions,
                                                     const CriteriaOptions& opt) {
  NodeId y = g.utility();
  Thm1Report t = thm1_conditions(g);
  for (const auto& [x, ok] : t.a)
    require(ok, ErrorCode::PreconditionViolated, "condition A fails");
  for (const auto& [xz, ok] : t.b)
    require(ok, ErrorCode::PreconditionViolated, "condition B fails");
  for (NodeId ch : g.relatives(z0, Relation::Children))
    require(!g.is_decision(ch) || target_decisions.count(ch) > 0,
            ErrorCode::PreconditionViolated,
            "X' must contain every decision child of Z0");
  NodeSet z{z0};
  require(!lb_factorizable(g, target_decisions, z, opt).has_value(),
          ErrorCode::PreconditionViolated,
          "the sets are LB-factorizable; no paths to extract");

  NodeSet cprime = derived_contexts(g, target_decisions, z);

  // Case 1: condition I is violated. The active witness from a policy node
  // must enter its decision through Z0, and truncating there leaves the info
  // path; a control path follows from condition A.
  if (!condition_one_holds(g, target_decisions, cprime)) {
    NodeSet cond = closure(g, set_union(target_decisions, cprime));
    for (NodeId x : target_decisions) {
      if (!policy_relevance(g, x, cond)) continue;
      // Rebuild the witness as a real path: pi_X -> X <- Z0 --- Y means an
      // active path from Z0 to Y given cond, with X activated as a collider.
      require(!cond.count(z0), ErrorCode::InternalAssertion,
              "Z0 unexpectedly inside the conditioning closure");
      auto m = active_path_witness(g, z0, y, cond);
      require(m.has_value(), ErrorCode::InternalAssertion,
              "condition I violated but no active path from Z0");
      auto d = g.directed_path(x, y);
      require(d.has_value(), ErrorCode::InternalAssertion,
              "condition A holds but no control path");
      return ExtractedPaths{*m, *d, y};
    }
    fail(ErrorCode::InternalAssertion,
         "condition I violated but no policy node is connected");
  }

  // Case 2: condition II is violated for the canonical ordering (topological
  // in H, with Z0's H-descendants after it).
  OrderingGraph h = build_ordering_graph(g, target_decisions, z);
  NodeSet h_desc_z0;
  {
    std::deque<NodeId> work{z0};
    h_desc_z0.insert(z0);
    while (!work.empty()) {
      NodeId v = work.front();
      work.pop_front();
      auto it = h.successors.find(v);
      if (it == h.successors.end()) continue;
      for (NodeId w : it->second)
        if (h_desc_z0.insert(w).second) work.push_back(w);
    }
  }
  std::optional<std::vector<NodeId>> ordering;
  for_each_topological_order(
      h, opt.ordering_budget, [&](const std::vector<NodeId>& order) {
        bool seen_z0 = false;
        for (NodeId v : order) {
          if (v == z0) {
            seen_z0 = true;
            continue;
          }
          if (seen_z0 && !h_desc_z0.count(v)) return false;
          if (!seen_z0 && h_desc_z0.count(v)) return false;
        }
        ordering = order;
        return true;
      });
  require(ordering.has_value(), ErrorCode::InternalAssertion,
          "no topological ordering of the ordering graph");

  NodeSet z_before, xc_before;
  for (NodeId c : *ordering) {
    if (cprime.count(c) && !condition_two_holds_at(g, c, z_before, xc_before)) {
      // Witness path from Z0 to this context, active given the prefix
      // closure.
      NodeSet cond = closure(g, xc_before);
      auto p = active_path_witness(g, z0, c, cond);
      require(p.has_value(), ErrorCode::InternalAssertion,
              "condition II violated but no witness path");

      // Expand colliders into explicit detours, truncate at the first
      // C'-member after Z0 in the ordering, then shortcut retraces.
      std::vector<NodeId> walk;
      auto after_z0 = [&](NodeId v) {
        if (!cprime.count(v)) return false;
        auto iz = std::find(ordering->begin(), ordering->end(), z0);
        auto iv = std::find(ordering->begin(), ordering->end(), v);
        return iv > iz;
      };
      for (std::size_t i = 0; i < p->vertices.size(); ++i) {
        NodeId v = p->vertices[i];
        walk.push_back(v);
        if (i > 0 && i + 1 < p->vertices.size() &&
            p->shapes[i] == Shape::Collider && !cond.count(v)) {
          // Detour to the activating member of the conditioning set.
          NodeSet desc = g.relatives(v, Relation::Descendants);
          for (NodeId s : desc) {
            if (!cond.count(s)) continue;
            auto q = g.directed_path(v, s);
            require(q.has_value(), ErrorCode::InternalAssertion,
                    "collider activation without a directed path");
            for (std::size_t k = 1; k < q->vertices.size(); ++k)
              walk.push_back(q->vertices[k]);
            for (std::size_t k = q->vertices.size() - 1; k-- > 0;)
              walk.push_back(q->vertices[k]);
            break;
          }
        }
      }
      std::vector<NodeId> truncated;
      for (NodeId v : walk) {
        truncated.push_back(v);
        if (v != z0 && after_z0(v)) break;
      }
      // Shortcut revisits: keep the first occurrence, cut the loop.
      std::vector<NodeId> simple;
      for (NodeId v : truncated) {
        auto it = std::find(simple.begin(), simple.end(), v);
        if (it != simple.end())
          simple.erase(it + 1, simple.end());
        else
          simple.push_back(v);
      }
      NodeId target = simple.back();
      require(cprime.count(target), ErrorCode::InternalAssertion,
              "truncation did not end at a C' member");
      Path m = g.make_path(simple);
      require(is_active_path(g, m, closure(g, set_union(target_decisions, cprime))) ||
                  is_active_path(g, m, cond),
              ErrorCode::InternalAssertion,
              "extracted info path is not active");

      // Control path: Z0 -> X -> ... -> target for a decision child of Z0.
      for (NodeId x : g.relatives(z0, Relation::Children)) {
        if (!target_decisions.count(x)) continue;
        if (auto d = g.directed_path(x, target)) return ExtractedPaths{m, *d, target};
      }
      fail(ErrorCode::InternalAssertion,
           "no decision child of Z0 reaches the extracted target");
    }
    if (z.count(c)) z_before.insert(c);
    if (target_decisions.count(c) || cprime.count(c)) xc_before.insert(c);
  }
  fail(ErrorCode::InternalAssertion,
       "conditions I-III all hold; nothing to extract");
}

bool minimal_context_separator_check(const ScopedGraph& g, NodeId z,
                                     const NodeSet& predecessors,
                                     const NodeSet& fixed,
                                     const NodeSet& exogenous) {
  NodeSet cl = closure(g, fixed);
  NodeSet targets = set_minus(predecessors, cl);
  targets.erase(z);
  if (targets.empty()) return true;
  NodeSet given = set_union(set_intersect(predecessors, cl), exogenous);
  given.erase(z);
  return d_separated(g, {z}, targets, given);
}

NodeSet fix_point(const ScopedGraph& g, const FactorizationWitness& witness,
                  const NodeSet& t) {
  NodeSet cur = t;
  for (;;) {
    NodeSet next = closure(g, cur);
    for (NodeId z : witness.z) {
      if (next.count(z)) continue;
      NodeSet pred;
      for (NodeId v : witness.ordering) {
        if (v == z) break;
        pred.insert(v);
      }
      if (minimal_context_separator_check(g, z, pred, cur, witness.exogenous))
        next.insert(z);
    }
    if (next == cur) return cur;
    cur = next;
  }
}

std::optional<FactorizationWitness> immaterial_by_lb2(const ScopedGraph& g,
                                                      NodeId x, NodeId z0,
                                                      const CriteriaOptions& opt) {
  const auto& ctx = g.contexts(x);
  require(std::find(ctx.begin(), ctx.end(), z0) != ctx.end(),
          ErrorCode::NotAContext,
          g.name(z0) + " is not a context of " + g.name(x));

  auto works = [&](const NodeSet& xs, const NodeSet& zs)
      -> std::optional<FactorizationWitness> {
    if (set_intersect(xs, zs).size() > 0) return std::nullopt;
    std::optional<FactorizationWitness> w;
    try {
      w = lb_factorizable(g, xs, zs, opt);
    } catch (const VgError&) {
      return std::nullopt;
    }
    if (!w) return std::nullopt;
    for (NodeId xi : xs) {
      NodeSet cx;
      for (NodeId c : g.contexts(xi)) cx.insert(c);
      NodeSet fixed = fix_point(g, *w, set_minus(cx, zs));
      if (!set_minus(cx, fixed).empty()) return std::nullopt;
    }
    return w;
  };

  // Candidate growth: Z starts at {z0}; X' starts at {x} and grows by
  // decisions whose contexts meet Z; Z grows by contexts of X'. Breadth is
  // bounded; the paper gives no selection procedure.
  std::vector<std::pair<NodeSet, NodeSet>> frontier{{NodeSet{x}, NodeSet{z0}}};
  std::set<std::pair<NodeSet, NodeSet>> seen{{NodeSet{x}, NodeSet{z0}}};
  std::size_t examined = 0;
  while (!frontier.empty() && examined < opt.lb2_candidate_budget) {
    auto [xs, zs] = frontier.front();
    frontier.erase(frontier.begin());
    ++examined;
    if (auto w = works(xs, zs)) return w;

    if (xs.size() < opt.lb2_set_size_bound) {
      for (NodeId d : g.decisions()) {
        if (xs.count(d) || zs.count(d)) continue;
        bool touches = false;
        for (NodeId c : g.contexts(d))
          if (zs.count(c)) touches = true;
        if (!touches) continue;
        auto cand = std::make_pair(set_union(xs, {d}), zs);
        if (seen.insert(cand).second) frontier.push_back(cand);
      }
    }
    if (zs.size() < opt.lb2_set_size_bound) {
      for (NodeId c : derived_contexts(g, xs, zs)) {
        auto cand = std::make_pair(xs, set_union(zs, {c}));
        if (set_intersect(cand.first, cand.second).empty() &&
            seen.insert(cand).second)
          frontier.push_back(cand);
      }
    }
  }
  return std::nullopt;
}

CriterionReport criterion_report(const ScopedGraph& g, const CriteriaOptions& opt) {
  CriterionReport r;
  r.soluble_order = solubility(g);
  r.thm1 = thm1_conditions(g);
  bool thm1_all = r.thm1.all();
  for (NodeId x : g.decisions()) {
    for (NodeId z : g.contexts(x)) {
      EdgeReport e;
      e.decision = x;
      e.context = z;
      if (single_decision_criterion(g, x, z) == SingleDecisionVerdict::Immaterial) {
        e.verdict = EdgeVerdict::ImmaterialSingleDecision;
      } else if (auto w = immaterial_by_lb2(g, x, z, opt)) {
        e.verdict = EdgeVerdict::ImmaterialLB2;
        e.witness = w;
      } else if (thm1_all) {
        e.verdict = EdgeVerdict::MaterialByThm1;
      } else {
        e.verdict = EdgeVerdict::Unknown;
      }
      r.edges.push_back(e);
    }
  }
  return r;
}

}  // namespace voigraph
