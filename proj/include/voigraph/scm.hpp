#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "voigraph/graph.hpp"
#include "voigraph/rational.hpp"

namespace voigraph {

using Value = std::uint64_t;

/// Expression tree for structural-function descriptors. Widths are explicit:
/// every expression evaluates to a value of a fixed bit width, except Add,
/// which produces a plain integer (utility component sums).
struct Expr {
  enum class Kind {
    Const,   // fixed value of fixed width
    In,      // bit-slice [lo, lo+width) of a named parent, counted from the left
    Exo,     // bit-slice of this variable's exogenous draw
    Cat,     // concatenation, left to right
    Idx,     // args[0][args[1]]: single bit of a string selected by an index
    Eq,      // 1 bit: args[0] == args[1] (widths must match)
    Xor,     // bitwise xor of equal-width args
    Add,     // integer sum of args (utility)
    Compat,  // 1 bit: <args[0..n-2]> compatible with args[n-1]
    Table,   // row-major lookup over (parents..., exo)
  };
  Kind kind = Kind::Const;
  std::uint32_t width = 0;
  Value value = 0;          // Const
  std::string parent;       // In
  std::uint32_t lo = 0;     // In / Exo
  std::vector<Expr> args;   // Cat / Idx / Eq / Xor / Add / Compat
  std::vector<Value> table; // Table

  static Expr constant(Value v, std::uint32_t w);
  static Expr input(std::string parent, std::uint32_t lo, std::uint32_t w);
  static Expr input_all(std::string parent, std::uint32_t w) {
    return input(std::move(parent), 0, w);
  }
  static Expr exo(std::uint32_t lo, std::uint32_t w);
  static Expr cat(std::vector<Expr> parts);
  static Expr idx(Expr str, Expr index);
  static Expr eq(Expr a, Expr b);
  static Expr bxor(Expr a, Expr b);
  static Expr add(std::vector<Expr> parts);
  static Expr compat(std::vector<Expr> w_parts, Expr u, std::uint32_t base);
  static Expr from_table(std::vector<Value> rows);
};

struct Variable {
  std::string name;
  NodeKind kind = NodeKind::Chance;
  Value card = 1;                     // domain size
  std::optional<std::uint32_t> bits;  // set when card == 2^bits
  std::vector<std::string> parents;   // endogenous parents, graph order
  std::vector<Rational> exo_probs;    // exogenous support; empty = none
  std::optional<Expr> fn;             // chance and utility variables only
  std::vector<Rational> utility_values;  // utility only: value -> rational
};

/// Assignment over all variables, indexed by variable position.
using Assignment = std::vector<Value>;

/// Deterministic policy: per decision, a flat table from the mixed-radix
/// context-assignment index (contexts in declared order) to a value.
struct Policy {
  std::map<std::string, std::vector<Value>> rules;
};

/// Finite-domain structural model with exact rational semantics. Decisions
/// carry declared domains but no structural function. Immutable once built;
/// evaluation helpers live in CompiledScm.
struct FiniteSCM {
  std::vector<Variable> variables;  // construction order

  const Variable& var(const std::string& name) const;
  std::size_t index_of(const std::string& name) const;
  const Variable& utility_var() const;
  std::vector<std::string> decision_names() const;

  /// The scoped graph induced by parent sets and decision contexts.
  ScopedGraph graph() const;

  void validate() const;
};

/// Scope: the context set each decision is allowed to observe. Defaults to
/// the decision's parents; VoI queries shrink it.
struct Scope {
  std::map<std::string, std::vector<std::string>> contexts;

  static Scope of(const FiniteSCM& scm);
  Scope without(const std::string& decision, const std::string& context) const;
};

/// Flattened evaluator shared by everything that enumerates worlds.
class CompiledScm {
 public:
  CompiledScm(const FiniteSCM& scm, const Scope& scope);

  const FiniteSCM& scm() const { return scm_; }
  const Scope& scope() const { return scope_; }
  std::size_t n() const { return order_.size(); }

  std::size_t world_count() const { return world_count_; }
  /// Exogenous assignment of the k-th world plus its exact probability.
  void world(std::size_t k, std::vector<Value>& exo_out, Rational& prob_out) const;
  Rational world_probability(const std::vector<Value>& exo) const;

  /// Topological evaluation; exo indexed like variables (unused slots 0).
  Assignment evaluate(const Policy& policy, const std::vector<Value>& exo) const;
  Rational utility_of(const Assignment& a) const;

  std::size_t var_index(const std::string& name) const;
  const std::vector<std::size_t>& topo_order() const { return order_; }
  std::size_t exo_card(std::size_t vi) const { return exo_card_[vi]; }
  /// Evaluates one variable's structural function against an assignment.
  Value eval_function(std::size_t vi, const Assignment& a, Value exo) const {
    return eval_fn(vi, a, exo);
  }

  /// Mixed-radix index of a decision's context assignment.
  std::size_t context_cell(const std::string& decision, const Assignment& a) const;
  std::size_t context_cells(const std::string& decision) const;

 private:
  friend class PolicyIterator;
  FiniteSCM scm_;
  Scope scope_;
  std::vector<std::size_t> order_;              // evaluation order
  std::vector<std::vector<std::size_t>> parent_idx_;
  std::vector<std::vector<std::size_t>> context_idx_;
  std::vector<std::vector<Value>> tables_;      // per var; empty for decisions
  std::vector<std::size_t> exo_card_;
  std::size_t world_count_ = 1;

  Value eval_fn(std::size_t vi, const Assignment& a, Value exo) const;
};

/// Evaluates a descriptor against named inputs given as (value, width)
/// pairs; `exo` supplies the variable's own exogenous draw. Table
/// descriptors are not supported here.
Value eval_expr_standalone(
    const Expr& e,
    const std::map<std::string, std::pair<Value, std::uint32_t>>& inputs,
    Value exo, std::uint32_t exo_bits);

FiniteSCM intervene(const FiniteSCM& scm, const std::map<std::string, Value>& fixed);

Rational expected_utility(const FiniteSCM& scm, const Scope& scope,
                          const Policy& policy);

/// Exact marginal over the named variables; keys are value tuples in the
/// order given.
std::map<std::vector<Value>, Rational> joint_distribution(
    const FiniteSCM& scm, const Scope& scope, const Policy& policy,
    const std::vector<std::string>& over, std::size_t world_budget = 1u << 20);

/// Exact conditional-independence test P(A,B|C) = P(A|C)P(B|C).
bool ci_oracle(const FiniteSCM& scm, const Scope& scope, const Policy& policy,
               const std::vector<std::string>& a, const std::vector<std::string>& b,
               const std::vector<std::string>& c);

/// Random full-support model over a scoped graph; deterministic in seed.
FiniteSCM random_scm(const ScopedGraph& g, std::uint64_t seed,
                     std::uint32_t bits_per_node);

FiniteSCM parse_scm(const std::string& text);
std::string scm_to_json(const FiniteSCM& scm);

}  // namespace voigraph
