#include "voigraph/policy.hpp"

#include <algorithm>
#include <functional>
#include <random>
#include <thread>

namespace voigraph {

namespace {

std::size_t cells_for(const FiniteSCM& scm, const Scope& scope,
                      const std::string& decision) {
  std::size_t cells = 1;
  for (const auto& c : scope.contexts.at(decision)) cells *= scm.var(c).card;
  return cells;
}

}  // namespace

PolicyEnumerator::PolicyEnumerator(const FiniteSCM& scm, const Scope& scope,
                                   const BigInt& budget) {
  total_ = 1;
  for (const auto& [name, ctx] : scope.contexts) {
    names_.push_back(name);
    cards_.push_back(scm.var(name).card);
    std::size_t cells = cells_for(scm, scope, name);
    rules_.emplace_back(cells, 0);
    BigInt space;
    mpz_ui_pow_ui(space.get_mpz_t(), static_cast<unsigned long>(cards_.back()),
                  static_cast<unsigned long>(cells));
    total_ *= space;
  }
  require(total_ <= budget, ErrorCode::PolicySpaceTooLarge,
          "deterministic policy count " + total_.get_str() +
              " exceeds budget " + budget.get_str());
}

bool PolicyEnumerator::next(Policy& out) {
  if (done_) return false;
  if (!first_) {
    bool carried = true;
    for (std::size_t d = rules_.size(); carried && d-- > 0;) {
      auto& rule = rules_[d];
      for (std::size_t i = rule.size(); carried && i-- > 0;) {
        if (++rule[i] < cards_[d])
          carried = false;
        else
          rule[i] = 0;
      }
    }
    if (carried) {
      done_ = true;
      return false;
    }
  }
  first_ = false;
  out.rules.clear();
  for (std::size_t d = 0; d < names_.size(); ++d) out.rules[names_[d]] = rules_[d];
  return true;
}

BigInt deterministic_policy_count(const FiniteSCM& scm, const Scope& scope) {
  BigInt total = 1;
  for (const auto& [name, ctx] : scope.contexts) {
    BigInt space;
    mpz_ui_pow_ui(space.get_mpz_t(),
                  static_cast<unsigned long>(scm.var(name).card),
                  static_cast<unsigned long>(cells_for(scm, scope, name)));
    total *= space;
  }
  return total;
}

// ---------------------------------------------------------------------------
// MEU search

namespace {

// A parentless chance source observed by some decision is pure noise when no
// structural function varies in it. Fixing one slice of such a source
// preserves the attainable expected utility, so it can be dropped from every
// context set and pinned to a constant before enumeration.
std::vector<std::string> droppable_noise_sources(const CompiledScm& c,
                                                 const Scope& scope) {
  const FiniteSCM& scm = c.scm();
  std::vector<std::string> out;
  for (const auto& v : scm.variables) {
    if (v.kind != NodeKind::Chance || !v.parents.empty()) continue;
    bool observed = false;
    for (const auto& [d, ctx] : scope.contexts)
      if (std::find(ctx.begin(), ctx.end(), v.name) != ctx.end())
        observed = true;
    if (!observed) continue;

    bool inert = true;
    std::size_t src = scm.index_of(v.name);
    for (std::size_t ri = 0; ri < scm.variables.size() && inert; ++ri) {
      const Variable& reader = scm.variables[ri];
      if (reader.kind == NodeKind::Decision || !reader.fn) continue;
      auto pos = std::find(reader.parents.begin(), reader.parents.end(), v.name);
      if (pos == reader.parents.end()) continue;

      std::size_t rows = std::max<std::size_t>(1, reader.exo_probs.size());
      std::vector<std::size_t> pidx;
      for (const auto& p : reader.parents) {
        pidx.push_back(scm.index_of(p));
        rows *= scm.var(p).card;
      }
      if (rows > (1u << 16)) {
        inert = false;
        break;
      }

      std::vector<Value> assign(pidx.size(), 0);
      std::size_t slot = static_cast<std::size_t>(pos - reader.parents.begin());
      std::function<void(std::size_t)> walk = [&](std::size_t k) {
        if (!inert) return;
        if (k == assign.size()) {
          Assignment full(scm.variables.size(), 0);
          for (std::size_t i = 0; i < assign.size(); ++i)
            full[pidx[i]] = assign[i];
          std::size_t exo_card = std::max<std::size_t>(1, reader.exo_probs.size());
          for (std::size_t e = 0; e < exo_card && inert; ++e) {
            full[src] = 0;
            Value ref = c.eval_function(ri, full, e);
            for (Value s = 1; s < v.card && inert; ++s) {
              full[src] = s;
              if (c.eval_function(ri, full, e) != ref) inert = false;
            }
          }
          return;
        }
        if (k == slot) {
          assign[k] = 0;
          walk(k + 1);
          return;
        }
        for (Value x = 0; x < scm.variables[pidx[k]].card && inert; ++x) {
          assign[k] = x;
          walk(k + 1);
        }
      };
      walk(0);
    }
    if (inert) out.push_back(v.name);
  }
  return out;
}

struct OuterDecision {
  std::string name;
  std::size_t var;
  Value card = 0;
  std::size_t cells = 0;
};

// Decodes a policy index into rule tables, most-significant decision first,
// cell 0 most significant within a decision.
void decode_policy(const std::vector<OuterDecision>& outer, BigInt idx,
                   std::vector<std::vector<Value>>& rules) {
  for (std::size_t d = outer.size(); d-- > 0;) {
    auto& rule = rules[d];
    for (std::size_t i = rule.size(); i-- > 0;) {
      BigInt q, r;
      mpz_fdiv_qr_ui(q.get_mpz_t(), r.get_mpz_t(), idx.get_mpz_t(),
                     static_cast<unsigned long>(outer[d].card));
      rule[i] = static_cast<Value>(r.get_ui());
      idx = q;
    }
  }
}

struct WorldData {
  std::vector<Value> exo;
  Rational prob;
};

}  // namespace

MEUResult meu(const FiniteSCM& scm, const Scope& scope, const SearchOptions& opt) {
  CompiledScm probe(scm, scope);

  // Noise-context reduction.
  std::vector<std::string> dropped = droppable_noise_sources(probe, scope);
  Scope red = scope;
  FiniteSCM red_scm = scm;
  for (const auto& s : dropped) {
    for (auto& [d, ctx] : red.contexts)
      ctx.erase(std::remove(ctx.begin(), ctx.end(), s), ctx.end());
    Variable& v = red_scm.variables[red_scm.index_of(s)];
    v.exo_probs.clear();
    v.fn = Expr::constant(0, v.bits ? *v.bits : 0);
  }

  CompiledScm c(red_scm, red);
  ScopedGraph g = red_scm.graph();

  // One decision whose value no other decision can observe (directly or
  // through descendants) is optimized cell-by-cell instead of enumerated.
  std::vector<std::string> decisions;
  for (const auto& [d, ctx] : red.contexts) decisions.push_back(d);
  std::string eliminated;
  BigInt best_savings = 0;
  for (const auto& cand : decisions) {
    NodeSet desc = g.relatives(g.id(cand), Relation::Descendants);
    bool ok = true;
    for (const auto& other : decisions) {
      if (other == cand) continue;
      for (const auto& ctxvar : red.contexts.at(other))
        if (desc.count(g.id(ctxvar))) ok = false;
    }
    if (!ok) continue;
    BigInt space;
    mpz_ui_pow_ui(space.get_mpz_t(),
                  static_cast<unsigned long>(red_scm.var(cand).card),
                  static_cast<unsigned long>(cells_for(red_scm, red, cand)));
    if (space > best_savings) {
      best_savings = space;
      eliminated = cand;
    }
  }

  std::vector<OuterDecision> outer;
  BigInt outer_total = 1;
  for (const auto& d : decisions) {
    if (d == eliminated) continue;
    OuterDecision od;
    od.name = d;
    od.var = c.var_index(d);
    od.card = red_scm.var(d).card;
    od.cells = cells_for(red_scm, red, d);
    BigInt space;
    mpz_ui_pow_ui(space.get_mpz_t(), static_cast<unsigned long>(od.card),
                  static_cast<unsigned long>(od.cells));
    outer_total *= space;
    outer.push_back(od);
  }
  require(outer_total <= opt.policy_budget, ErrorCode::PolicySpaceTooLarge,
          "policy enumeration count " + outer_total.get_str() +
              " exceeds budget " + opt.policy_budget.get_str());

  // Worlds.
  std::vector<WorldData> worlds(c.world_count());
  for (std::size_t k = 0; k < worlds.size(); ++k)
    c.world(k, worlds[k].exo, worlds[k].prob);

  // Evaluation split around the eliminated decision.
  std::size_t elim_var = eliminated.empty() ? c.n() : c.var_index(eliminated);
  NodeSet elim_desc;
  if (!eliminated.empty())
    elim_desc = g.relatives(g.id(eliminated), Relation::Descendants);
  auto in_elim_desc = [&](std::size_t vi) {
    return !eliminated.empty() &&
           elim_desc.count(g.id(red_scm.variables[vi].name)) > 0;
  };

  std::vector<std::size_t> prefix, suffix;
  for (std::size_t vi : c.topo_order()) {
    if (vi == elim_var) continue;
    const Variable& v = red_scm.variables[vi];
    if (!eliminated.empty() && v.kind != NodeKind::Decision && in_elim_desc(vi))
      suffix.push_back(vi);
    else
      prefix.push_back(vi);
  }

  const Value elim_card = eliminated.empty() ? 1 : red_scm.var(eliminated).card;
  const std::size_t elim_cells =
      eliminated.empty() ? 1 : cells_for(red_scm, red, eliminated);

  // Utility bound for early exit.
  const Variable& uvar = red_scm.utility_var();
  Rational u_max = uvar.utility_values.front();
  for (const auto& u : uvar.utility_values) u_max = std::max(u_max, u);
  std::size_t util_var = red_scm.index_of(uvar.name);

  Rational best_value;
  BigInt best_index = -1;
  std::vector<std::vector<Value>> best_rules;
  std::vector<Value> best_elim_rule;
  BigInt examined = 0;

  auto run_range = [&](const BigInt& lo, const BigInt& hi, Rational& out_value,
                       BigInt& out_index, std::vector<std::vector<Value>>& out_rules,
                       std::vector<Value>& out_elim, BigInt& out_examined,
                       bool allow_early_exit) {
    std::vector<std::vector<Value>> rules;
    for (const auto& od : outer) rules.emplace_back(od.cells, 0);
    Policy pol;
    for (const auto& od : outer) pol.rules[od.name];
    if (!eliminated.empty()) pol.rules[eliminated];

    Assignment a(c.n(), 0);
    // accum[cell][x] = expected utility mass for that context cell and action
    std::vector<std::vector<Rational>> accum(elim_cells,
                                             std::vector<Rational>(elim_card));
    out_index = -1;
    for (BigInt idx = lo; idx < hi; ++idx) {
      decode_policy(outer, idx, rules);
      for (std::size_t d = 0; d < outer.size(); ++d)
        pol.rules[outer[d].name] = rules[d];
      ++out_examined;

      for (auto& row : accum)
        for (auto& cell : row) cell = 0;

      Rational value = 0;
      for (const auto& w : worlds) {
        // Prefix: everything not strictly downstream of the eliminated
        // decision.
        for (std::size_t vi : prefix) {
          const Variable& v = red_scm.variables[vi];
          if (v.kind == NodeKind::Decision) {
            std::size_t cell = c.context_cell(v.name, a);
            a[vi] = pol.rules[v.name][cell];
          } else {
            a[vi] = c.eval_function(vi, a, w.exo[vi]);
          }
        }
        if (eliminated.empty()) {
          value += w.prob * uvar.utility_values[a[util_var]];
        } else {
          std::size_t cell = c.context_cell(eliminated, a);
          for (Value x = 0; x < elim_card; ++x) {
            a[elim_var] = x;
            for (std::size_t vi : suffix)
              a[vi] = c.eval_function(vi, a, w.exo[vi]);
            accum[cell][x] += w.prob * uvar.utility_values[a[util_var]];
          }
        }
      }
      std::vector<Value> elim_rule(elim_cells, 0);
      if (!eliminated.empty()) {
        for (std::size_t cell = 0; cell < elim_cells; ++cell) {
          Rational cell_best = accum[cell][0];
          Value arg = 0;
          for (Value x = 1; x < elim_card; ++x)
            if (accum[cell][x] > cell_best) {
              cell_best = accum[cell][x];
              arg = x;
            }
          elim_rule[cell] = arg;
          value += cell_best;
        }
      }

      if (out_index < 0 || value > out_value) {
        out_value = value;
        out_index = idx;
        out_rules = rules;
        out_elim = elim_rule;
        if (allow_early_exit && out_value == u_max) break;
      }
    }
  };

  int threads = std::max(1, opt.threads);
  if (threads == 1 || outer_total < 64) {
    run_range(0, outer_total, best_value, best_index, best_rules, best_elim_rule,
              examined, true);
  } else {
    struct ThreadOut {
      Rational value;
      BigInt index = -1;
      std::vector<std::vector<Value>> rules;
      std::vector<Value> elim;
      BigInt examined = 0;
    };
    std::vector<ThreadOut> outs(static_cast<std::size_t>(threads));
    std::vector<std::thread> pool;
    BigInt chunk = outer_total / threads + 1;
    for (int t = 0; t < threads; ++t) {
      BigInt lo = chunk * t;
      BigInt hi = std::min(BigInt(chunk * (t + 1)), outer_total);
      if (lo >= hi) continue;
      pool.emplace_back([&, t, lo, hi]() {
        run_range(lo, hi, outs[t].value, outs[t].index, outs[t].rules,
                  outs[t].elim, outs[t].examined, false);
      });
    }
    for (auto& th : pool) th.join();
    for (const auto& o : outs) {
      examined += o.examined;
      if (o.index < 0) continue;
      if (best_index < 0 || o.value > best_value ||
          (o.value == best_value && o.index < best_index)) {
        best_value = o.value;
        best_index = o.index;
        best_rules = o.rules;
        best_elim_rule = o.elim;
      }
    }
  }
  require(best_index >= 0, ErrorCode::InternalAssertion, "empty policy space");

  // Reassemble the witness over the caller's scope: reduced rules replicate
  // across any dropped noise contexts.
  MEUResult result;
  result.value = best_value;
  result.policies_examined = examined;
  Policy reduced_witness;
  for (std::size_t d = 0; d < outer.size(); ++d)
    reduced_witness.rules[outer[d].name] = best_rules[d];
  if (!eliminated.empty()) reduced_witness.rules[eliminated] = best_elim_rule;

  for (const auto& [dname, full_ctx] : scope.contexts) {
    const auto& red_ctx = red.contexts.at(dname);
    const auto& red_rule = reduced_witness.rules.at(dname);
    std::size_t full_cells = cells_for(scm, scope, dname);
    std::vector<Value> full_rule(full_cells, 0);
    for (std::size_t cell = 0; cell < full_cells; ++cell) {
      // Decode the full cell, keep coordinates of surviving contexts.
      std::size_t rest = cell, red_cell = 0;
      std::vector<Value> coord(full_ctx.size(), 0);
      for (std::size_t i = full_ctx.size(); i-- > 0;) {
        coord[i] = rest % scm.var(full_ctx[i]).card;
        rest /= scm.var(full_ctx[i]).card;
      }
      for (std::size_t i = 0; i < full_ctx.size(); ++i) {
        if (std::find(red_ctx.begin(), red_ctx.end(), full_ctx[i]) ==
            red_ctx.end())
          continue;
        red_cell = red_cell * scm.var(full_ctx[i]).card + coord[i];
      }
      full_rule[cell] = red_rule[red_cell];
    }
    result.witness.rules[dname] = full_rule;
  }
  return result;
}

Rational voi(const FiniteSCM& scm, const Scope& scope,
             const std::string& decision, const std::string& context,
             const SearchOptions& opt) {
  MEUResult with = meu(scm, scope, opt);
  MEUResult without = meu(scm, scope.without(decision, context), opt);
  Rational v = with.value - without.value;
  require(v >= 0, ErrorCode::InternalAssertion,
          "value of information came out negative");
  return v;
}

// ---------------------------------------------------------------------------
// Stochastic policies

Rational expected_utility_stochastic(const FiniteSCM& scm, const Scope& scope,
                                     const StochasticPolicy& policy) {
  CompiledScm c(scm, scope);
  const Variable& uvar = scm.utility_var();
  std::size_t util_var = scm.index_of(uvar.name);
  Rational total = 0;

  std::vector<Value> exo;
  Rational p;
  Assignment a(c.n(), 0);
  std::function<void(std::size_t, Rational)> rec = [&](std::size_t oi,
                                                       Rational weight) {
    if (oi == c.topo_order().size()) {
      total += weight * uvar.utility_values[a[util_var]];
      return;
    }
    std::size_t vi = c.topo_order()[oi];
    const Variable& v = c.scm().variables[vi];
    if (v.kind == NodeKind::Decision) {
      std::size_t cell = c.context_cell(v.name, a);
      const auto& dist = policy.rules.at(v.name).at(cell);
      for (Value x = 0; x < v.card; ++x) {
        if (dist[x] == 0) continue;
        a[vi] = x;
        rec(oi + 1, weight * dist[x]);
      }
    } else {
      a[vi] = c.eval_function(vi, a, exo[vi]);
      rec(oi + 1, weight);
    }
  };

  for (std::size_t k = 0; k < c.world_count(); ++k) {
    c.world(k, exo, p);
    rec(0, p);
  }
  return total;
}

bool stochastic_bound_check(const FiniteSCM& scm, const Scope& scope,
                            std::size_t samples, std::uint64_t seed,
                            const SearchOptions& opt) {
  Rational bound = meu(scm, scope, opt).value;
  std::mt19937_64 rng(seed);
  for (std::size_t s = 0; s < samples; ++s) {
    StochasticPolicy pol;
    for (const auto& [dname, ctx] : scope.contexts) {
      Value card = scm.var(dname).card;
      std::size_t cells = cells_for(scm, scope, dname);
      auto& rules = pol.rules[dname];
      rules.resize(cells);
      for (auto& dist : rules) {
        dist.resize(card);
        Rational total = 0;
        for (auto& w : dist) {
          w = Rational(static_cast<long>(rng() % 8));
          total += w;
        }
        if (total == 0) {
          dist[rng() % card] = 1;
          total = 1;
        }
        for (auto& w : dist) w /= total;
      }
    }
    if (expected_utility_stochastic(scm, scope, pol) > bound) return false;
  }
  return true;
}

}  // namespace voigraph
