#include "voigraph/scm.hpp"

#include <algorithm>
#include <functional>
#include <random>
#include <sstream>

#include "json.hpp"
#include "voigraph/bitstring.hpp"

namespace voigraph {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Expr construction

Expr Expr::constant(Value v, std::uint32_t w) {
  Expr e;
  e.kind = Kind::Const;
  e.width = w;
  e.value = v;
  return e;
}
Expr Expr::input(std::string parent, std::uint32_t lo, std::uint32_t w) {
  Expr e;
  e.kind = Kind::In;
  e.parent = std::move(parent);
  e.lo = lo;
  e.width = w;
  return e;
}
Expr Expr::exo(std::uint32_t lo, std::uint32_t w) {
  Expr e;
  e.kind = Kind::Exo;
  e.lo = lo;
  e.width = w;
  return e;
}
Expr Expr::cat(std::vector<Expr> parts) {
  Expr e;
  e.kind = Kind::Cat;
  for (const auto& p : parts) e.width += p.width;
  e.args = std::move(parts);
  return e;
}
Expr Expr::idx(Expr str, Expr index) {
  Expr e;
  e.kind = Kind::Idx;
  e.width = 1;
  e.args = {std::move(str), std::move(index)};
  return e;
}
Expr Expr::eq(Expr a, Expr b) {
  Expr e;
  e.kind = Kind::Eq;
  e.width = 1;
  e.args = {std::move(a), std::move(b)};
  return e;
}
Expr Expr::bxor(Expr a, Expr b) {
  Expr e;
  e.kind = Kind::Xor;
  e.width = a.width;
  e.args = {std::move(a), std::move(b)};
  return e;
}
Expr Expr::add(std::vector<Expr> parts) {
  Expr e;
  e.kind = Kind::Add;
  e.args = std::move(parts);
  return e;
}
Expr Expr::compat(std::vector<Expr> w_parts, Expr u, std::uint32_t base) {
  Expr e;
  e.kind = Kind::Compat;
  e.width = 1;
  e.lo = base;  // reuse: base width of the w-sequence
  e.args = std::move(w_parts);
  e.args.push_back(std::move(u));
  return e;
}
Expr Expr::from_table(std::vector<Value> rows) {
  Expr e;
  e.kind = Kind::Table;
  e.table = std::move(rows);
  return e;
}

// ---------------------------------------------------------------------------
// FiniteSCM basics

const Variable& FiniteSCM::var(const std::string& name) const {
  return variables.at(index_of(name));
}

std::size_t FiniteSCM::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < variables.size(); ++i)
    if (variables[i].name == name) return i;
  fail(ErrorCode::UnknownNode, "unknown SCM variable: " + name);
}

const Variable& FiniteSCM::utility_var() const {
  for (const auto& v : variables)
    if (v.kind == NodeKind::Utility) return v;
  fail(ErrorCode::MissingUtility, "SCM has no utility variable");
}

std::vector<std::string> FiniteSCM::decision_names() const {
  std::vector<std::string> out;
  for (const auto& v : variables)
    if (v.kind == NodeKind::Decision) out.push_back(v.name);
  return out;
}

ScopedGraph FiniteSCM::graph() const {
  std::vector<std::pair<std::string, NodeKind>> nodes;
  std::vector<std::pair<std::string, std::string>> edges;
  std::map<std::string, std::vector<std::string>> contexts;
  for (const auto& v : variables) {
    nodes.emplace_back(v.name, v.kind);
    for (const auto& p : v.parents) edges.emplace_back(p, v.name);
    if (v.kind == NodeKind::Decision) contexts[v.name] = v.parents;
  }
  return ScopedGraph::build(std::move(nodes), std::move(edges), std::move(contexts));
}

void FiniteSCM::validate() const {
  std::size_t utilities = 0;
  for (const auto& v : variables) {
    require(v.card >= 1, ErrorCode::SchemaError, v.name + ": empty domain");
    if (v.bits)
      require(v.card == (Value(1) << *v.bits), ErrorCode::SchemaError,
              v.name + ": bits do not match card");
    if (v.kind == NodeKind::Decision) {
      require(!v.fn, ErrorCode::SchemaError, v.name + ": decision has a function");
      require(v.exo_probs.empty(), ErrorCode::SchemaError,
              v.name + ": decision has exogenous noise");
    } else {
      require(v.fn.has_value(), ErrorCode::SchemaError,
              v.name + ": missing structural function");
    }
    if (v.kind == NodeKind::Utility) {
      ++utilities;
      require(v.utility_values.size() == v.card, ErrorCode::SchemaError,
              v.name + ": utility value table does not cover the domain");
    }
    if (!v.exo_probs.empty()) {
      Rational sum = 0;
      for (const auto& p : v.exo_probs) {
        require(p > 0, ErrorCode::SchemaError,
                v.name + ": exogenous probabilities must be positive");
        sum += p;
      }
      require(sum == 1, ErrorCode::SchemaError,
              v.name + ": exogenous probabilities must sum to 1");
    }
  }
  require(utilities == 1, ErrorCode::MissingUtility,
          "SCM needs exactly one utility variable");
  graph();  // validates acyclicity and context mirroring
}

Scope Scope::of(const FiniteSCM& scm) {
  Scope s;
  for (const auto& v : scm.variables)
    if (v.kind == NodeKind::Decision) s.contexts[v.name] = v.parents;
  return s;
}

Scope Scope::without(const std::string& decision, const std::string& context) const {
  Scope s = *this;
  auto it = s.contexts.find(decision);
  require(it != s.contexts.end(), ErrorCode::UnknownNode,
          "unknown decision: " + decision);
  auto& ctx = it->second;
  auto pos = std::find(ctx.begin(), ctx.end(), context);
  require(pos != ctx.end(), ErrorCode::NotAContext,
          context + " is not a context of " + decision);
  ctx.erase(pos);
  return s;
}

// ---------------------------------------------------------------------------
// Expression evaluation

namespace {

struct EvalCtx {
  std::function<std::pair<Value, std::uint32_t>(const std::string&)> input;
  Value exo = 0;
  std::uint32_t exo_bits = 0;
};

std::uint32_t width_of_var(const Variable& v) {
  if (v.bits) return *v.bits;
  // Non-power-of-two domains still need a working width for slicing; they
  // only ever appear as whole-value inputs.
  std::uint32_t w = 0;
  while ((Value(1) << w) < v.card) ++w;
  return w;
}

Value slice(Value value, std::uint32_t total_width, std::uint32_t lo,
            std::uint32_t w) {
  require(lo + w <= total_width, ErrorCode::DomainViolation,
          "bit slice out of range");
  std::uint32_t shift = total_width - lo - w;
  Value mask = w >= 64 ? ~Value(0) : (Value(1) << w) - 1;
  return (value >> shift) & mask;
}

Value eval_expr(const Expr& e, const EvalCtx& ctx) {
  switch (e.kind) {
    case Expr::Kind::Const:
      return e.value;
    case Expr::Kind::In: {
      auto [value, width] = ctx.input(e.parent);
      return slice(value, width, e.lo, e.width);
    }
    case Expr::Kind::Exo:
      return slice(ctx.exo, ctx.exo_bits, e.lo, e.width);
    case Expr::Kind::Cat: {
      Value v = 0;
      for (const auto& p : e.args) v = (v << p.width) | eval_expr(p, ctx);
      return v;
    }
    case Expr::Kind::Idx: {
      Bitstring s(eval_expr(e.args[0], ctx), e.args[0].width);
      return static_cast<Value>(s.bit(eval_expr(e.args[1], ctx)));
    }
    case Expr::Kind::Eq:
      return eval_expr(e.args[0], ctx) == eval_expr(e.args[1], ctx) ? 1 : 0;
    case Expr::Kind::Xor:
      return eval_expr(e.args[0], ctx) ^ eval_expr(e.args[1], ctx);
    case Expr::Kind::Add: {
      Value v = 0;
      for (const auto& p : e.args) v += eval_expr(p, ctx);
      return v;
    }
    case Expr::Kind::Compat: {
      std::vector<Bitstring> w;
      for (std::size_t i = 0; i + 1 < e.args.size(); ++i)
        w.emplace_back(eval_expr(e.args[i], ctx), e.args[i].width);
      Bitstring u(eval_expr(e.args.back(), ctx), e.args.back().width);
      return compatible(w, u) ? 1 : 0;
    }
    case Expr::Kind::Table:
      // Tables are materialized into CompiledScm::tables_ at build time.
      fail(ErrorCode::InternalAssertion, "Table exprs are evaluated via tables_");
  }
  fail(ErrorCode::InternalAssertion, "unreachable expr kind");
}

}  // namespace

// ---------------------------------------------------------------------------
// CompiledScm

CompiledScm::CompiledScm(const FiniteSCM& scm, const Scope& scope)
    : scm_(scm), scope_(scope) {
  scm_.validate();
  const std::size_t n = scm_.variables.size();
  parent_idx_.resize(n);
  context_idx_.resize(n);
  tables_.resize(n);
  exo_card_.assign(n, 1);

  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& p : scm_.variables[i].parents)
      parent_idx_[i].push_back(scm_.index_of(p));
    if (!scm_.variables[i].exo_probs.empty())
      exo_card_[i] = scm_.variables[i].exo_probs.size();
  }
  for (const auto& [dname, ctx] : scope_.contexts) {
    std::size_t di = scm_.index_of(dname);
    require(scm_.variables[di].kind == NodeKind::Decision, ErrorCode::SchemaError,
            dname + " in scope is not a decision");
    for (const auto& c : ctx) {
      std::size_t ci = scm_.index_of(c);
      require(std::find(parent_idx_[di].begin(), parent_idx_[di].end(), ci) !=
                  parent_idx_[di].end(),
              ErrorCode::NotAContext,
              c + " is not a graph parent of " + dname);
      context_idx_[di].push_back(ci);
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    if (scm_.variables[i].kind == NodeKind::Decision)
      require(scope_.contexts.count(scm_.variables[i].name) > 0,
              ErrorCode::IncompletePolicy,
              "scope missing decision " + scm_.variables[i].name);

  // Topological order by parent dependencies.
  std::vector<std::size_t> indeg(n, 0);
  std::vector<std::vector<std::size_t>> kids(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t p : parent_idx_[i]) {
      ++indeg[i];
      kids[p].push_back(i);
    }
  std::vector<std::size_t> ready;
  for (std::size_t i = 0; i < n; ++i)
    if (indeg[i] == 0) ready.push_back(i);
  while (!ready.empty()) {
    std::size_t v = ready.back();
    ready.pop_back();
    order_.push_back(v);
    for (std::size_t c : kids[v])
      if (--indeg[c] == 0) ready.push_back(c);
  }
  require(order_.size() == n, ErrorCode::CycleError, "SCM dependencies cyclic");

  for (std::size_t i = 0; i < n; ++i) {
    world_count_ *= exo_card_[i];
    require(world_count_ <= (std::size_t(1) << 20), ErrorCode::DomainExplosion,
            "exogenous world count exceeds budget");
  }

  // Pre-tabulate functions where the row space stays small.
  for (std::size_t i = 0; i < n; ++i) {
    const Variable& v = scm_.variables[i];
    if (!v.fn) continue;
    if (v.fn->kind == Expr::Kind::Table) {
      tables_[i] = v.fn->table;
      std::size_t rows = exo_card_[i];
      for (std::size_t p : parent_idx_[i]) rows *= scm_.variables[p].card;
      require(tables_[i].size() == rows, ErrorCode::SchemaError,
              v.name + ": table size mismatch");
      continue;
    }
    std::size_t rows = exo_card_[i];
    for (std::size_t p : parent_idx_[i]) {
      rows *= scm_.variables[p].card;
      if (rows > (1u << 18)) break;
    }
    if (rows > (1u << 18)) continue;  // evaluate expression on the fly
    std::vector<Value> table(rows);
    Assignment a(n, 0);
    std::vector<Value> pa(parent_idx_[i].size(), 0);
    for (std::size_t row = 0; row < rows; ++row) {
      std::size_t rest = row;
      Value exo = static_cast<Value>(rest % exo_card_[i]);
      rest /= exo_card_[i];
      for (std::size_t k = parent_idx_[i].size(); k-- > 0;) {
        std::size_t pi = parent_idx_[i][k];
        a[pi] = rest % scm_.variables[pi].card;
        rest /= scm_.variables[pi].card;
      }
      std::uint32_t exo_bits = 0;
      while ((std::size_t(1) << exo_bits) < exo_card_[i]) ++exo_bits;
      EvalCtx ctx;
      ctx.input = [&](const std::string& name) -> std::pair<Value, std::uint32_t> {
        for (std::size_t pk = 0; pk < v.parents.size(); ++pk)
          if (v.parents[pk] == name) {
            const Variable& pv = scm_.variables[parent_idx_[i][pk]];
            return {a[parent_idx_[i][pk]], width_of_var(pv)};
          }
        fail(ErrorCode::UnknownNode, v.name + " reads non-parent " + name);
      };
      ctx.exo = exo;
      ctx.exo_bits = exo_bits;
      Value out = eval_expr(*v.fn, ctx);
      require(out < v.card, ErrorCode::DomainViolation,
              v.name + ": function output outside domain");
      table[row] = out;
    }
    tables_[i] = std::move(table);
  }
}

std::size_t CompiledScm::var_index(const std::string& name) const {
  return scm_.index_of(name);
}

void CompiledScm::world(std::size_t k, std::vector<Value>& exo_out,
                        Rational& prob_out) const {
  exo_out.assign(n(), 0);
  prob_out = 1;
  for (std::size_t i = n(); i-- > 0;) {
    if (exo_card_[i] == 1) continue;
    exo_out[i] = k % exo_card_[i];
    k /= exo_card_[i];
    prob_out *= scm_.variables[i].exo_probs[exo_out[i]];
  }
}

Rational CompiledScm::world_probability(const std::vector<Value>& exo) const {
  Rational p = 1;
  for (std::size_t i = 0; i < n(); ++i)
    if (exo_card_[i] > 1) p *= scm_.variables[i].exo_probs[exo[i]];
  return p;
}

Value CompiledScm::eval_fn(std::size_t vi, const Assignment& a, Value exo) const {
  const Variable& v = scm_.variables[vi];
  if (!tables_[vi].empty()) {
    std::size_t row = 0;
    for (std::size_t p : parent_idx_[vi]) row = row * scm_.variables[p].card + a[p];
    return tables_[vi][row * exo_card_[vi] + exo];
  }
  std::uint32_t exo_bits = 0;
  while ((std::size_t(1) << exo_bits) < exo_card_[vi]) ++exo_bits;
  EvalCtx ctx;
  ctx.input = [&](const std::string& name) -> std::pair<Value, std::uint32_t> {
    for (std::size_t pk = 0; pk < v.parents.size(); ++pk)
      if (v.parents[pk] == name) {
        const Variable& pv = scm_.variables[parent_idx_[vi][pk]];
        return {a[parent_idx_[vi][pk]], width_of_var(pv)};
      }
    fail(ErrorCode::UnknownNode, v.name + " reads non-parent " + name);
  };
  ctx.exo = exo;
  ctx.exo_bits = exo_bits;
  Value out = eval_expr(*v.fn, ctx);
  require(out < v.card, ErrorCode::DomainViolation,
          v.name + ": function output outside domain");
  return out;
}

Value eval_expr_standalone(
    const Expr& e,
    const std::map<std::string, std::pair<Value, std::uint32_t>>& inputs,
    Value exo, std::uint32_t exo_bits) {
  EvalCtx ctx;
  ctx.input = [&](const std::string& name) -> std::pair<Value, std::uint32_t> {
    auto it = inputs.find(name);
    require(it != inputs.end(), ErrorCode::UnknownNode,
            "expression reads unknown input " + name);
    return it->second;
  };
  ctx.exo = exo;
  ctx.exo_bits = exo_bits;
  return eval_expr(e, ctx);
}

Assignment CompiledScm::evaluate(const Policy& policy,
                                 const std::vector<Value>& exo) const {
  Assignment a(n(), 0);
  for (std::size_t vi : order_) {
    const Variable& v = scm_.variables[vi];
    if (v.kind == NodeKind::Decision) {
      auto it = policy.rules.find(v.name);
      require(it != policy.rules.end(), ErrorCode::IncompletePolicy,
              "policy missing decision " + v.name);
      std::size_t cell = context_cell(v.name, a);
      require(cell < it->second.size(), ErrorCode::IncompletePolicy,
              "policy rule for " + v.name + " does not cover its contexts");
      Value out = it->second[cell];
      require(out < v.card, ErrorCode::DomainViolation,
              v.name + ": policy output outside domain");
      a[vi] = out;
    } else {
      require(exo[vi] < exo_card_[vi], ErrorCode::DomainViolation,
              v.name + ": exogenous index out of range");
      a[vi] = eval_fn(vi, a, exo[vi]);
    }
  }
  return a;
}

Rational CompiledScm::utility_of(const Assignment& a) const {
  for (std::size_t i = 0; i < n(); ++i)
    if (scm_.variables[i].kind == NodeKind::Utility)
      return scm_.variables[i].utility_values[a[i]];
  fail(ErrorCode::MissingUtility, "no utility variable");
}

std::size_t CompiledScm::context_cell(const std::string& decision,
                                      const Assignment& a) const {
  std::size_t di = scm_.index_of(decision);
  std::size_t cell = 0;
  for (std::size_t ci : context_idx_[di])
    cell = cell * scm_.variables[ci].card + a[ci];
  return cell;
}

std::size_t CompiledScm::context_cells(const std::string& decision) const {
  std::size_t di = scm_.index_of(decision);
  std::size_t cells = 1;
  for (std::size_t ci : context_idx_[di]) cells *= scm_.variables[ci].card;
  return cells;
}

// ---------------------------------------------------------------------------
// Library operations

FiniteSCM intervene(const FiniteSCM& scm, const std::map<std::string, Value>& fixed) {
  FiniteSCM out = scm;
  for (auto& [name, value] : fixed) {
    Variable& v = out.variables[out.index_of(name)];
    require(value < v.card, ErrorCode::DomainViolation,
            name + ": intervention value outside domain");
    std::uint32_t w = v.bits ? *v.bits : 0;
    if (v.kind == NodeKind::Decision) v.kind = NodeKind::Chance;
    v.exo_probs.clear();
    v.fn = Expr::constant(value, w);
  }
  return out;
}

Rational expected_utility(const FiniteSCM& scm, const Scope& scope,
                          const Policy& policy) {
  CompiledScm c(scm, scope);
  Rational total = 0;
  std::vector<Value> exo;
  Rational p;
  for (std::size_t k = 0; k < c.world_count(); ++k) {
    c.world(k, exo, p);
    total += p * c.utility_of(c.evaluate(policy, exo));
  }
  return total;
}

std::map<std::vector<Value>, Rational> joint_distribution(
    const FiniteSCM& scm, const Scope& scope, const Policy& policy,
    const std::vector<std::string>& over, std::size_t world_budget) {
  CompiledScm c(scm, scope);
  require(c.world_count() <= world_budget, ErrorCode::DomainExplosion,
          "world count exceeds budget");
  std::vector<std::size_t> idx;
  for (const auto& name : over) idx.push_back(c.var_index(name));
  std::map<std::vector<Value>, Rational> out;
  std::vector<Value> exo;
  Rational p;
  for (std::size_t k = 0; k < c.world_count(); ++k) {
    c.world(k, exo, p);
    Assignment a = c.evaluate(policy, exo);
    std::vector<Value> key;
    key.reserve(idx.size());
    for (std::size_t i : idx) key.push_back(a[i]);
    out[key] += p;
  }
  return out;
}

bool ci_oracle(const FiniteSCM& scm, const Scope& scope, const Policy& policy,
               const std::vector<std::string>& a, const std::vector<std::string>& b,
               const std::vector<std::string>& c) {
  std::vector<std::string> all = a;
  all.insert(all.end(), b.begin(), b.end());
  all.insert(all.end(), c.begin(), c.end());
  auto joint = joint_distribution(scm, scope, policy, all);

  auto project = [&](const std::vector<Value>& key, bool keep_a, bool keep_b) {
    std::vector<Value> out;
    std::size_t i = 0;
    for (; i < a.size(); ++i)
      if (keep_a) out.push_back(key[i]);
    for (; i < a.size() + b.size(); ++i)
      if (keep_b) out.push_back(key[i]);
    for (; i < key.size(); ++i) out.push_back(key[i]);
    return out;
  };

  std::map<std::vector<Value>, Rational> p_ac, p_bc, p_c;
  for (const auto& [key, p] : joint) {
    p_ac[project(key, true, false)] += p;
    p_bc[project(key, false, true)] += p;
    p_c[project(key, false, false)] += p;
  }
  // P(a,b,c) * P(c) == P(a,c) * P(b,c), exactly, wherever P(c) > 0.
  for (const auto& [key, p_abc] : joint) {
    auto ac = project(key, true, false);
    auto bc = project(key, false, true);
    auto cc = project(key, false, false);
    if (p_abc * p_c[cc] != p_ac[ac] * p_bc[bc]) return false;
  }
  // Pairs with P(a,b,c) == 0 but positive marginals also violate CI.
  for (const auto& [kac, pac] : p_ac) {
    for (const auto& [kbc, pbc] : p_bc) {
      std::vector<Value> cc(kac.begin() + static_cast<long>(a.size()), kac.end());
      std::vector<Value> cc2(kbc.begin() + static_cast<long>(b.size()), kbc.end());
      if (cc != cc2) continue;
      std::vector<Value> key;
      key.insert(key.end(), kac.begin(), kac.begin() + static_cast<long>(a.size()));
      key.insert(key.end(), kbc.begin(), kbc.begin() + static_cast<long>(b.size()));
      key.insert(key.end(), cc.begin(), cc.end());
      auto it = joint.find(key);
      Rational p_abc = it == joint.end() ? Rational(0) : it->second;
      if (p_abc * p_c[cc] != pac * pbc) return false;
    }
  }
  return true;
}

FiniteSCM random_scm(const ScopedGraph& g, std::uint64_t seed,
                     std::uint32_t bits_per_node) {
  require(bits_per_node >= 1 && bits_per_node <= 2, ErrorCode::PreconditionViolated,
          "bits_per_node must be 1 or 2");
  std::mt19937_64 rng(seed);
  auto rnd = [&](std::uint64_t m) { return rng() % m; };

  FiniteSCM scm;
  Value card = Value(1) << bits_per_node;
  auto order = g.one_topological_order();
  for (NodeId v : order) {
    Variable var;
    var.name = g.name(v);
    var.kind = g.kind(v);
    var.card = card;
    var.bits = bits_per_node;
    for (NodeId p : g.parents(v)) var.parents.push_back(g.name(p));
    if (var.kind != NodeKind::Decision) {
      // Full-support random exogenous noise and a random total function.
      var.exo_probs.resize(card);
      Rational total = 0;
      std::vector<long> weights(card);
      for (auto& w : weights) {
        w = 1 + static_cast<long>(rnd(8));
        total += w;
      }
      for (std::size_t i = 0; i < card; ++i)
        var.exo_probs[i] = Rational(weights[i]) / total;
      std::size_t rows = card;  // exo factor
      for (NodeId p : g.parents(v)) {
        (void)p;
        rows *= card;
      }
      std::vector<Value> table(rows);
      for (auto& t : table) t = rnd(card);
      var.fn = Expr::from_table(std::move(table));
    }
    if (var.kind == NodeKind::Utility) {
      var.utility_values.resize(card);
      for (std::size_t i = 0; i < card; ++i)
        var.utility_values[i] = Rational(static_cast<long>(i));
    }
    scm.variables.push_back(std::move(var));
  }
  scm.validate();
  return scm;
}

// ---------------------------------------------------------------------------
// JSON serialization

namespace {

json expr_to_json(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Const:
      return {{"k", "const"}, {"w", e.width}, {"v", e.value}};
    case Expr::Kind::In:
      return {{"k", "in"}, {"p", e.parent}, {"lo", e.lo}, {"w", e.width}};
    case Expr::Kind::Exo:
      return {{"k", "exo"}, {"lo", e.lo}, {"w", e.width}};
    case Expr::Kind::Cat: {
      json parts = json::array();
      for (const auto& p : e.args) parts.push_back(expr_to_json(p));
      return {{"k", "cat"}, {"parts", parts}};
    }
    case Expr::Kind::Idx:
      return {{"k", "index"},
              {"s", expr_to_json(e.args[0])},
              {"i", expr_to_json(e.args[1])}};
    case Expr::Kind::Eq:
      return {{"k", "eq"},
              {"a", expr_to_json(e.args[0])},
              {"b", expr_to_json(e.args[1])}};
    case Expr::Kind::Xor:
      return {{"k", "xor"},
              {"a", expr_to_json(e.args[0])},
              {"b", expr_to_json(e.args[1])}};
    case Expr::Kind::Add: {
      json parts = json::array();
      for (const auto& p : e.args) parts.push_back(expr_to_json(p));
      return {{"k", "sum"}, {"parts", parts}};
    }
    case Expr::Kind::Compat: {
      json w_parts = json::array();
      for (std::size_t i = 0; i + 1 < e.args.size(); ++i)
        w_parts.push_back(expr_to_json(e.args[i]));
      return {{"k", "compat"},
              {"w", w_parts},
              {"u", expr_to_json(e.args.back())},
              {"base", e.lo}};
    }
    case Expr::Kind::Table:
      return {{"k", "table"}, {"rows", e.table}};
  }
  fail(ErrorCode::InternalAssertion, "unreachable expr kind");
}

Expr expr_from_json(const json& j) {
  std::string k = j.at("k");
  if (k == "const") return Expr::constant(j.at("v"), j.at("w"));
  if (k == "in") return Expr::input(j.at("p"), j.at("lo"), j.at("w"));
  if (k == "exo") return Expr::exo(j.at("lo"), j.at("w"));
  if (k == "cat") {
    std::vector<Expr> parts;
    for (const auto& p : j.at("parts")) parts.push_back(expr_from_json(p));
    return Expr::cat(std::move(parts));
  }
  if (k == "index")
    return Expr::idx(expr_from_json(j.at("s")), expr_from_json(j.at("i")));
  if (k == "eq")
    return Expr::eq(expr_from_json(j.at("a")), expr_from_json(j.at("b")));
  if (k == "xor")
    return Expr::bxor(expr_from_json(j.at("a")), expr_from_json(j.at("b")));
  if (k == "sum") {
    std::vector<Expr> parts;
    for (const auto& p : j.at("parts")) parts.push_back(expr_from_json(p));
    return Expr::add(std::move(parts));
  }
  if (k == "compat") {
    std::vector<Expr> w_parts;
    for (const auto& p : j.at("w")) w_parts.push_back(expr_from_json(p));
    return Expr::compat(std::move(w_parts), expr_from_json(j.at("u")),
                        j.at("base"));
  }
  if (k == "table") {
    std::vector<Value> rows;
    for (const auto& r : j.at("rows")) rows.push_back(r.get<Value>());
    return Expr::from_table(std::move(rows));
  }
  fail(ErrorCode::SchemaError, "unknown function descriptor kind: " + k);
}

}  // namespace

FiniteSCM parse_scm(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::SchemaError, std::string("bad JSON: ") + e.what());
  }
  FiniteSCM scm;
  for (const auto& vj : doc.at("variables")) {
    Variable v;
    v.name = vj.at("name");
    std::string kind = vj.at("kind");
    v.kind = kind == "chance"     ? NodeKind::Chance
             : kind == "decision" ? NodeKind::Decision
             : kind == "utility"  ? NodeKind::Utility
                                  : (fail(ErrorCode::SchemaError,
                                          "bad variable kind: " + kind),
                                     NodeKind::Chance);
    if (vj.contains("bits")) {
      v.bits = vj.at("bits").get<std::uint32_t>();
      v.card = Value(1) << *v.bits;
    } else {
      v.card = vj.at("card").get<Value>();
    }
    if (vj.contains("parents"))
      for (const auto& p : vj.at("parents")) v.parents.push_back(p);
    if (vj.contains("exo"))
      for (const auto& p : vj.at("exo"))
        v.exo_probs.push_back(parse_rational(p.get<std::string>()));
    if (vj.contains("fn")) v.fn = expr_from_json(vj.at("fn"));
    if (vj.contains("utility_values"))
      for (const auto& u : vj.at("utility_values"))
        v.utility_values.push_back(parse_rational(u.get<std::string>()));
    scm.variables.push_back(std::move(v));
  }
  scm.validate();
  return scm;
}

std::string scm_to_json(const FiniteSCM& scm) {
  json doc;
  doc["variables"] = json::array();
  for (const auto& v : scm.variables) {
    json vj;
    vj["name"] = v.name;
    vj["kind"] = v.kind == NodeKind::Chance     ? "chance"
                 : v.kind == NodeKind::Decision ? "decision"
                                                : "utility";
    if (v.bits)
      vj["bits"] = *v.bits;
    else
      vj["card"] = v.card;
    if (!v.parents.empty()) vj["parents"] = v.parents;
    if (!v.exo_probs.empty()) {
      json probs = json::array();
      for (const auto& p : v.exo_probs) probs.push_back(rational_str(p));
      vj["exo"] = probs;
    }
    if (v.fn) vj["fn"] = expr_to_json(*v.fn);
    if (!v.utility_values.empty()) {
      json uv = json::array();
      for (const auto& u : v.utility_values) uv.push_back(rational_str(u));
      vj["utility_values"] = uv;
    }
    doc["variables"].push_back(vj);
  }
  return doc.dump(2);
}

}  // namespace voigraph
