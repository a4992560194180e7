#include "voigraph/policy.hpp"

#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "voigraph/fixtures.hpp"

using namespace voigraph;

TEST_CASE("policy enumeration covers the space exactly once") {
  FiniteSCM m = *fixture_scm("yes-voi");
  Scope s = Scope::of(m);
  PolicyEnumerator en(m, s);
  CHECK(en.total() == 4);  // two cells, two actions
  std::set<std::vector<Value>> seen;
  Policy pol;
  while (en.next(pol)) seen.insert(pol.rules.at("X"));
  CHECK(seen.size() == 4);
}

TEST_CASE("policy budget failure reports the exact count") {
  FiniteSCM m = *fixture_scm("obstacle-2");
  try {
    PolicyEnumerator en(m, Scope::of(m), BigInt(1000));
    FAIL("expected PolicySpaceTooLarge");
  } catch (const VgError& e) {
    CHECK(e.code() == ErrorCode::PolicySpaceTooLarge);
    CHECK(std::string(e.what()).find("16777216") != std::string::npos);
  }
}

TEST_CASE("meu on the intro models") {
  FiniteSCM m = *fixture_scm("yes-voi");
  Scope s = Scope::of(m);
  MEUResult r = meu(m, s);
  CHECK(r.value == Rational(1));
  CHECK(expected_utility(m, s, r.witness) == r.value);
  CHECK(meu(m, s.without("X", "Z")).value == Rational(1, 2));

  FiniteSCM sr = *fixture_scm("yes-voi-no-sr");
  Scope ss = Scope::of(sr);
  CHECK(meu(sr, ss).value == Rational(1));
  CHECK(meu(sr, ss.without("Xp", "X")).value == Rational(1, 2));
}

TEST_CASE("meu matches the naive enumerator on random models") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 25; ++trial) {
    ScopedGraph g = oracle::random_graph(rng, 5, 2);
    FiniteSCM m = random_scm(g, rng(), 1);
    Scope s = Scope::of(m);
    MEUResult r = meu(m, s);
    CHECK(r.value == oracle::meu_naive(m, s));
    CHECK(expected_utility(m, s, r.witness) == r.value);
  }
}

TEST_CASE("meu witness achieves the value after scope reductions") {
  // The superimposed model exercises noise dropping and the cell-wise
  // eliminated decision; the witness must still be a full-scope policy.
  FiniteSCM m = *fixture_scm("superimposed");
  Scope s = Scope::of(m);
  MEUResult r = meu(m, s);
  CHECK(r.value == Rational(11));
  CHECK(expected_utility(m, s, r.witness) == Rational(11));
}

TEST_CASE("threaded search agrees with single-threaded") {
  FiniteSCM m = *fixture_scm("obstacle-2");
  Scope s = Scope::of(m);
  SearchOptions par;
  par.threads = 4;
  MEUResult a = meu(m, s);
  MEUResult b = meu(m, s, par);
  CHECK(a.value == b.value);
  CHECK(a.witness.rules == b.witness.rules);
}

TEST_CASE("voi is nonnegative and matches the definition") {
  std::mt19937_64 rng(32);
  int done = 0;
  while (done < 50) {
    ScopedGraph g = oracle::random_graph(rng, 5, 2);
    auto decisions = g.decisions();
    NodeId x = decisions[rng() % decisions.size()];
    if (g.contexts(x).empty()) continue;
    ++done;
    NodeId z = g.contexts(x)[rng() % g.contexts(x).size()];
    FiniteSCM m = random_scm(g, rng(), 1);
    Scope s = Scope::of(m);
    Rational v = voi(m, s, g.name(x), g.name(z));
    CHECK(v >= 0);
    CHECK(v == meu(m, s).value - meu(m, s.without(g.name(x), g.name(z))).value);
  }
}

TEST_CASE("removing a context never raises the meu") {
  std::mt19937_64 rng(33);
  int done = 0;
  while (done < 30) {
    ScopedGraph g = oracle::random_graph(rng, 5, 2);
    auto decisions = g.decisions();
    NodeId x = decisions[rng() % decisions.size()];
    if (g.contexts(x).empty()) continue;
    ++done;
    NodeId z = g.contexts(x)[rng() % g.contexts(x).size()];
    FiniteSCM m = random_scm(g, rng(), 1);
    Scope s = Scope::of(m);
    CHECK(meu(m, s.without(g.name(x), g.name(z))).value <= meu(m, s).value);
  }
}

TEST_CASE("meu value is invariant under node relabeling") {
  std::mt19937_64 rng(34);
  for (int trial = 0; trial < 10; ++trial) {
    ScopedGraph g = oracle::random_graph(rng, 5, 2);
    FiniteSCM m = random_scm(g, rng(), 1);
    FiniteSCM renamed = m;
    auto rename = [](const std::string& s) { return "qq_" + s; };
    for (auto& v : renamed.variables) {
      v.name = rename(v.name);
      for (auto& p : v.parents) p = rename(p);
    }
    CHECK(meu(m, Scope::of(m)).value ==
          meu(renamed, Scope::of(renamed)).value);
  }
}

TEST_CASE("stochastic policies never beat the deterministic meu") {
  std::mt19937_64 rng(35);
  for (int trial = 0; trial < 6; ++trial) {
    ScopedGraph g = oracle::random_graph(rng, 5, 2);
    FiniteSCM m = random_scm(g, rng(), 1);
    CHECK(stochastic_bound_check(m, Scope::of(m), 100, rng()));
  }
}

TEST_CASE("stochastic evaluation agrees with deterministic corner points") {
  FiniteSCM m = *fixture_scm("yes-voi");
  Scope s = Scope::of(m);
  StochasticPolicy sp;
  sp.rules["X"] = {{Rational(1), Rational(0)}, {Rational(0), Rational(1)}};
  CHECK(expected_utility_stochastic(m, s, sp) == Rational(1));
  StochasticPolicy mix;
  mix.rules["X"] = {{Rational(1, 2), Rational(1, 2)},
                    {Rational(1, 2), Rational(1, 2)}};
  CHECK(expected_utility_stochastic(m, s, mix) == Rational(1, 2));
}
