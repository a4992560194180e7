#pragma once

#include <map>
#include <optional>

#include "voigraph/separation.hpp"

namespace voigraph {

enum class EdgeVerdict {
  ImmaterialSingleDecision,
  ImmaterialLB2,
  MaterialByThm1,
  Unknown,
};

enum class SingleDecisionVerdict { PossiblyMaterial, Immaterial };

/// Precedence digraph over V' = Z u X' u C': an edge from each parent into
/// its decision, and from each decision to its descendants inside V'. Its
/// topological orders are exactly the orderings satisfying condition III.
struct OrderingGraph {
  std::vector<NodeId> vertices;                      // sorted
  std::set<std::pair<NodeId, NodeId>> edges;
  std::map<NodeId, std::vector<NodeId>> successors;  // sorted adjacency
};

struct FactorizationWitness {
  NodeSet target_decisions;  // X'
  NodeSet z;                 // Z
  NodeSet derived_contexts;  // C' = C_{X'} \ (X' u Z)
  NodeSet exogenous;         // U'; empty in this version
  std::vector<NodeId> ordering;
};

struct Thm1Report {
  std::map<NodeId, bool> a;                        // per decision
  std::map<std::pair<NodeId, NodeId>, bool> b;     // per (decision, context)
  std::map<std::pair<NodeId, NodeId>, bool> c;     // per (decision, context)
  bool all() const;
};

struct EdgeReport {
  NodeId decision;
  NodeId context;
  EdgeVerdict verdict = EdgeVerdict::Unknown;
  std::optional<FactorizationWitness> witness;  // ImmaterialLB2
};

struct CriterionReport {
  std::optional<std::vector<NodeId>> soluble_order;
  Thm1Report thm1;
  std::vector<EdgeReport> edges;
};

struct CriteriaOptions {
  std::size_t ordering_budget = 100000;  // topological orders examined
  std::size_t lb2_candidate_budget = 64;
  std::size_t lb2_set_size_bound = 4;
};

/// The conditioning set of theorem condition (C) for context z:
/// closure((X(S) u C_{X(S) \ {z}}) \ {z}).
NodeSet thm1_condition_c_set(const ScopedGraph& g, NodeId z);

/// Immaterial iff the utility is not a descendant of x, or z is d-separated
/// from the utility given {x} u C_x \ {z}. Complete only for single-decision
/// scopes; in multi-decision graphs a PossiblyMaterial answer decides nothing.
SingleDecisionVerdict single_decision_criterion(const ScopedGraph& g, NodeId x,
                                                NodeId z);

/// A decision ordering witnessing solubility, or absent. Searches all
/// decision permutations at desk scale.
std::optional<std::vector<NodeId>> solubility(const ScopedGraph& g);

Thm1Report thm1_conditions(const ScopedGraph& g);

OrderingGraph build_ordering_graph(const ScopedGraph& g, const NodeSet& target_decisions,
                                   const NodeSet& z);

/// Searches orderings of V' (topological orders of the ordering graph; they
/// are exactly the condition-III orderings) for one satisfying conditions
/// I-III; returns the first witness in deterministic order. Condition II is
/// checked without the policy-node term, which is equivalent.
std::optional<FactorizationWitness> lb_factorizable(
    const ScopedGraph& g, const NodeSet& target_decisions, const NodeSet& z,
    const CriteriaOptions& opt = {});

struct ExtractedPaths {
  Path info;     // m : Z0 --- target, active given closure(X' u C')
  Path control;  // d : X -> ... -> target, X in X'
  NodeId target; // a member of C' or the utility node
};

/// Path extraction from a failed LB-factorization, following the existence
/// lemma's proof: pick an ordering topological in the ordering graph with
/// Z0's descendants last, then split on which condition failed.
ExtractedPaths extract_paths_from_nonfactorizability(const ScopedGraph& g,
                                                     NodeId z0,
                                                     const NodeSet& target_decisions,
                                                     const CriteriaOptions& opt = {});

/// The separator reformulation that avoids computing minimal separators:
/// true iff z is d-separated from predecessors \ closure(fixed) given
/// (predecessors n closure(fixed)) u exogenous.
bool minimal_context_separator_check(const ScopedGraph& g, NodeId z,
                                     const NodeSet& predecessors,
                                     const NodeSet& fixed, const NodeSet& exogenous);

/// Least fixpoint of T against the witness's Z-set and ordering.
NodeSet fix_point(const ScopedGraph& g, const FactorizationWitness& witness,
                  const NodeSet& t);

/// Bounded search for a factorization witness certifying z0 immaterial for x
/// via the fix-point theorem; absent when none is found within budget.
std::optional<FactorizationWitness> immaterial_by_lb2(
    const ScopedGraph& g, NodeId x, NodeId z0, const CriteriaOptions& opt = {});

CriterionReport criterion_report(const ScopedGraph& g,
                                 const CriteriaOptions& opt = {});

}  // namespace voigraph
