#include "voigraph/scm.hpp"

#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "voigraph/bitstring.hpp"
#include "voigraph/fixtures.hpp"

using namespace voigraph;

TEST_CASE("evaluation of the yes-voi model") {
  FiniteSCM m = *fixture_scm("yes-voi");
  CompiledScm c(m, Scope::of(m));
  Policy copy_z;
  copy_z.rules["X"] = {0, 1};
  std::vector<Value> exo(m.variables.size(), 0);
  exo[c.var_index("Z")] = 1;
  Assignment a = c.evaluate(copy_z, exo);
  CHECK(a[c.var_index("Y")] == 1);
  CHECK(c.utility_of(a) == Rational(1));
}

TEST_CASE("constant model evaluates deterministically") {
  FiniteSCM m;
  Variable a;
  a.name = "A";
  a.kind = NodeKind::Chance;
  a.bits = 1;
  a.card = 2;
  a.fn = Expr::constant(1, 1);
  m.variables.push_back(a);
  Variable y;
  y.name = "Y";
  y.kind = NodeKind::Utility;
  y.card = 2;
  y.parents = {"A"};
  y.fn = Expr::input("A", 0, 1);
  y.utility_values = {Rational(0), Rational(7)};
  m.variables.push_back(y);
  m.validate();
  CHECK(expected_utility(m, Scope::of(m), Policy{}) == Rational(7));
}

TEST_CASE("expected utility of the yes-voi policies") {
  FiniteSCM m = *fixture_scm("yes-voi");
  Scope s = Scope::of(m);
  Policy copy_z;
  copy_z.rules["X"] = {0, 1};
  CHECK(expected_utility(m, s, copy_z) == Rational(1));
  Policy constant;
  constant.rules["X"] = {0, 0};
  CHECK(expected_utility(m, s, constant) == Rational(1, 2));
}

TEST_CASE("compliant policy value in the obstacle model") {
  FiniteSCM m = *fixture_scm("obstacle-2");
  Scope s = Scope::of(m);
  // x1 = v[z0]; x0 = <z0, x1>. Cells follow sorted context order.
  Policy pol;
  auto& x1 = pol.rules["X1"];  // contexts (V, Z0)
  x1.resize(8);
  for (Value v = 0; v < 4; ++v)
    for (Value z0 = 0; z0 < 2; ++z0)
      x1[v * 2 + z0] = Bitstring(v, 2).bit(z0);
  auto& x0 = pol.rules["X0"];  // contexts (C, X1, Z0)
  x0.resize(8);
  for (Value c0 = 0; c0 < 2; ++c0)
    for (Value x1v = 0; x1v < 2; ++x1v)
      for (Value z0 = 0; z0 < 2; ++z0)
        x0[c0 * 4 + x1v * 2 + z0] = (z0 << 1) | x1v;
  CHECK(expected_utility(m, s, pol) == Rational(1099, 100));
}

TEST_CASE("evaluation matches the naive recursive evaluator on random models") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    ScopedGraph g = oracle::random_graph(rng, 6, 2);
    FiniteSCM m = random_scm(g, rng(), 1);
    Scope s = Scope::of(m);
    Policy pol = oracle::random_policy(rng, m, s);
    CHECK(expected_utility(m, s, pol) == oracle::expected_utility_naive(m, s, pol));
  }
}

TEST_CASE("joint distribution normalizes exactly") {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 10; ++trial) {
    ScopedGraph g = oracle::random_graph(rng, 5, 2);
    FiniteSCM m = random_scm(g, rng(), 1);
    Scope s = Scope::of(m);
    Policy pol = oracle::random_policy(rng, m, s);
    std::vector<std::string> over;
    for (const auto& v : m.variables) over.push_back(v.name);
    auto joint = joint_distribution(m, s, pol, over);
    Rational total = 0;
    for (const auto& [k, p] : joint) total += p;
    CHECK(total == Rational(1));
  }
}

TEST_CASE("intervention pins a variable in every world") {
  FiniteSCM m = *fixture_scm("yes-voi");
  FiniteSCM fixed = intervene(m, {{"Z", 1}});
  Scope s = Scope::of(fixed);
  Policy constant;
  constant.rules["X"] = {1, 1};
  // Y = [z = x] with z pinned to 1 and x = 1.
  CHECK(expected_utility(fixed, s, constant) == Rational(1));
  auto joint = joint_distribution(fixed, s, constant, {"Z"});
  REQUIRE(joint.size() == 1);
  CHECK(joint.begin()->first[0] == 1);
}

TEST_CASE("intervening on an unconfounded source equals conditioning") {
  std::mt19937_64 rng(23);
  int done = 0;
  while (done < 10) {
    ScopedGraph g = oracle::random_graph(rng, 5, 1);
    FiniteSCM m = random_scm(g, rng(), 1);
    Scope s = Scope::of(m);
    Policy pol = oracle::random_policy(rng, m, s);
    // Pick a parentless chance source.
    std::string src;
    for (const auto& v : m.variables)
      if (v.kind == NodeKind::Chance && v.parents.empty()) src = v.name;
    if (src.empty()) continue;
    ++done;
    std::vector<std::string> over;
    for (const auto& v : m.variables)
      if (v.name != src) over.push_back(v.name);
    over.push_back(src);

    auto joint = joint_distribution(m, s, pol, over);
    for (Value x = 0; x < 2; ++x) {
      // P(rest | src = x) from the observational joint.
      Rational px = 0;
      std::map<std::vector<Value>, Rational> cond;
      for (const auto& [key, p] : joint) {
        if (key.back() != x) continue;
        px += p;
        cond[std::vector<Value>(key.begin(), key.end() - 1)] += p;
      }
      if (px == 0) continue;
      for (auto& [k, p] : cond) p /= px;

      FiniteSCM mx = intervene(m, {{src, x}});
      std::vector<std::string> rest(over.begin(), over.end() - 1);
      auto ijoint = joint_distribution(mx, Scope::of(mx), pol, rest);
      for (const auto& [k, p] : ijoint) {
        auto it = cond.find(k);
        Rational expect = it == cond.end() ? Rational(0) : it->second;
        CHECK(p == expect);
      }
    }
  }
}

TEST_CASE("d-separation implies exact conditional independence") {
  std::mt19937_64 rng(24);
  int done = 0;
  while (done < 50) {
    ScopedGraph g = oracle::random_graph(rng, 5 + rng() % 2, 2);
    FiniteSCM m = random_scm(g, rng(), 1);
    Scope s = Scope::of(m);
    Policy pol = oracle::random_policy(rng, m, s);
    NodeId a = rng() % g.size();
    NodeId b = rng() % g.size();
    if (a == b) continue;
    NodeSet given = oracle::random_subset(rng, g, {a, b});
    if (!d_separated(g, {a}, {b}, given)) continue;
    ++done;
    std::vector<std::string> ga{g.name(a)}, gb{g.name(b)}, gc;
    for (NodeId v : given) gc.push_back(g.name(v));
    CHECK(ci_oracle(m, s, pol, ga, gb, gc));
  }
}

TEST_CASE("random models are deterministic in the seed") {
  ScopedGraph g = fixture_graph("linear-no-voi");
  CHECK(scm_to_json(random_scm(g, 5, 1)) == scm_to_json(random_scm(g, 5, 1)));
  CHECK(scm_to_json(random_scm(g, 5, 1)) != scm_to_json(random_scm(g, 6, 1)));
}

TEST_CASE("scm json round-trips with identical behavior") {
  std::mt19937_64 rng(25);
  for (int trial = 0; trial < 10; ++trial) {
    ScopedGraph g = oracle::random_graph(rng, 5, 2);
    FiniteSCM m = random_scm(g, rng(), 1);
    FiniteSCM m2 = parse_scm(scm_to_json(m));
    CHECK(scm_to_json(m) == scm_to_json(m2));
    Scope s = Scope::of(m);
    Policy pol = oracle::random_policy(rng, m, s);
    CHECK(expected_utility(m, s, pol) == expected_utility(m2, s, pol));
  }
  // Descriptor-based fixtures round-trip too.
  for (const char* name : {"obstacle-2", "finite-domain-2", "superimposed"}) {
    FiniteSCM m = *fixture_scm(name);
    FiniteSCM m2 = parse_scm(scm_to_json(m));
    CHECK(scm_to_json(m) == scm_to_json(m2));
  }
}
