#include "voigraph/separation.hpp"

#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "voigraph/fixtures.hpp"

using namespace voigraph;

TEST_CASE("Z is d-separated from Y given X in the linear graph") {
  ScopedGraph g = fixture_graph("linear-no-voi");
  CHECK(d_separated(g, {g.id("Z")}, {g.id("Y")}, {g.id("X")}));
  CHECK(!d_separated(g, {g.id("Z")}, {g.id("Y")}, {}));
}

TEST_CASE("edgeless nodes are separated by the empty set") {
  ScopedGraph g = ScopedGraph::build(
      {{"A", NodeKind::Chance}, {"B", NodeKind::Chance}, {"Y", NodeKind::Utility}},
      {}, {});
  CHECK(d_separated(g, {g.id("A")}, {g.id("B")}, {}));
}

TEST_CASE("endpoints inside the conditioning set block every path") {
  ScopedGraph g = fixture_graph("yes-voi");
  CHECK(d_separated(g, {g.id("Z")}, {g.id("Y")}, {g.id("Z"), g.id("X")}));
}

TEST_CASE("d-separation matches the path-enumeration oracle") {
  std::mt19937_64 rng(42);
  int queries = 0;
  while (queries < 200) {
    ScopedGraph g = oracle::random_graph(rng, 4 + rng() % 4, 2);
    NodeId a = rng() % g.size();
    NodeId b = rng() % g.size();
    if (a == b) continue;
    NodeSet given = oracle::random_subset(rng, g, {a, b});
    ++queries;
    CHECK(d_separated(g, {a}, {b}, given) ==
          oracle::d_separated_enum(g, {a}, {b}, given));
  }
}

TEST_CASE("multi-node queries match the oracle") {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 60; ++trial) {
    ScopedGraph g = oracle::random_graph(rng, 6, 2);
    NodeSet a = oracle::random_subset(rng, g, {}, 25);
    NodeSet b = oracle::random_subset(rng, g, a, 25);
    if (a.empty() || b.empty()) continue;
    NodeSet ab = a;
    ab.insert(b.begin(), b.end());
    NodeSet given = oracle::random_subset(rng, g, ab, 25);
    CHECK(d_separated(g, a, b, given) ==
          oracle::d_separated_enum(g, a, b, given));
  }
}

TEST_CASE("closure of X in the triangle includes the parentless decision") {
  ScopedGraph g = fixture_graph("triangle");
  CHECK(closure(g, {g.id("X")}) == g.node_set({"Z", "X"}));
}

TEST_CASE("closure of the empty set includes context-free decisions") {
  ScopedGraph g = fixture_graph("triangle");
  NodeSet cl = closure(g, {});
  CHECK(cl.count(g.id("Z")) > 0);
}

TEST_CASE("closure is idempotent and monotone on random graphs") {
  std::mt19937_64 rng(44);
  for (int trial = 0; trial < 40; ++trial) {
    ScopedGraph g = oracle::random_graph(rng, 7, 3);
    NodeSet w = oracle::random_subset(rng, g, {});
    NodeSet cl = closure(g, w);
    CHECK(closure(g, cl) == cl);
    NodeSet w2 = w;
    w2.insert(rng() % g.size());
    NodeSet cl2 = closure(g, w2);
    for (NodeId v : cl) CHECK(cl2.count(v) > 0);
  }
}

TEST_CASE("active path witness agrees with d-separation") {
  std::mt19937_64 rng(45);
  for (int trial = 0; trial < 80; ++trial) {
    ScopedGraph g = oracle::random_graph(rng, 6, 2);
    NodeId a = rng() % g.size();
    NodeId b = rng() % g.size();
    if (a == b) continue;
    NodeSet given = oracle::random_subset(rng, g, {a, b});
    auto w = active_path_witness(g, a, b, given);
    CHECK(w.has_value() == !d_separated(g, {a}, {b}, given));
    if (w) {
      CHECK(w->vertices.front() == a);
      CHECK(w->vertices.back() == b);
      CHECK(is_active_path(g, *w, given));
      // Witness is shortest among active paths.
      std::size_t best = SIZE_MAX;
      for (const Path& p : oracle::all_simple_paths(g, a, b))
        if (oracle::path_active(g, p, given)) best = std::min(best, p.length());
      CHECK(w->length() == best);
    }
  }
}

TEST_CASE("policy relevance in the three-node graphs") {
  ScopedGraph yes = fixture_graph("yes-voi");
  CHECK(policy_relevance(yes, yes.id("X"), {}));

  ScopedGraph tri = fixture_graph("triangle");
  NodeSet cl = closure(tri, {tri.id("X")});
  CHECK(!policy_relevance(tri, tri.id("X"), cl));
}

TEST_CASE("policy relevance equals the graph-rewrite oracle") {
  std::mt19937_64 rng(46);
  for (int trial = 0; trial < 40; ++trial) {
    ScopedGraph g = oracle::random_graph(rng, 6, 2);
    auto decisions = g.decisions();
    if (decisions.empty()) continue;
    NodeId x = decisions[rng() % decisions.size()];
    NodeSet given = oracle::random_subset(rng, g, {x, g.utility()});

    // Materialize pi_X as a real parentless parent and re-run d-separation.
    std::vector<std::pair<std::string, NodeKind>> nodes;
    std::vector<std::pair<std::string, std::string>> edges;
    std::map<std::string, std::vector<std::string>> contexts;
    for (NodeId v = 0; v < g.size(); ++v) {
      nodes.emplace_back(g.name(v), g.kind(v));
      for (NodeId w : g.relatives(v, Relation::Children))
        edges.emplace_back(g.name(v), g.name(w));
    }
    nodes.emplace_back("pi_of_x", NodeKind::Chance);
    edges.emplace_back("pi_of_x", g.name(x));
    for (NodeId d : decisions) {
      std::vector<std::string> ctx;
      for (NodeId c : g.contexts(d)) ctx.push_back(g.name(c));
      if (d == x) ctx.push_back("pi_of_x");
      contexts[g.name(d)] = ctx;
    }
    ScopedGraph g2 = ScopedGraph::build(nodes, edges, contexts);
    NodeSet given2;
    for (NodeId v : given) given2.insert(g2.id(g.name(v)));
    bool expect =
        !d_separated(g2, {g2.id("pi_of_x")}, {g2.id(g.name(g.utility()))}, given2);
    CHECK(policy_relevance(g, x, given) == expect);
  }
}

TEST_CASE("weak union graphoid holds on random graphs") {
  std::mt19937_64 rng(47);
  int done = 0;
  while (done < 100) {
    ScopedGraph g = oracle::random_graph(rng, 6, 2);
    NodeSet a = oracle::random_subset(rng, g, {}, 25);
    NodeSet b = oracle::random_subset(rng, g, a, 35);
    if (a.empty() || b.size() < 2) continue;
    NodeSet ab = a;
    ab.insert(b.begin(), b.end());
    NodeSet c = oracle::random_subset(rng, g, ab, 25);
    if (!d_separated(g, a, b, c)) continue;
    ++done;
    // Move a random sub-chunk of B into the conditioning set.
    NodeSet z;
    for (NodeId v : b)
      if (rng() % 2) z.insert(v);
    NodeSet b_rest;
    for (NodeId v : b)
      if (!z.count(v)) b_rest.insert(v);
    NodeSet cz = c;
    cz.insert(z.begin(), z.end());
    if (b_rest.empty()) continue;
    CHECK(d_separated(g, a, b_rest, cz));
  }
}

TEST_CASE("maximal conditioning set of ancestors separates") {
  std::mt19937_64 rng(48);
  int done = 0;
  while (done < 100) {
    ScopedGraph g = oracle::random_graph(rng, 6, 2);
    NodeId y = g.utility();
    NodeSet anc = g.relatives(y, Relation::Ancestors);
    anc.erase(y);
    NodeSet a;
    for (NodeId v : anc)
      if (rng() % 2) a.insert(v);
    NodeSet a_sub;
    for (NodeId v : a)
      if (rng() % 2) a_sub.insert(v);
    NodeId z = rng() % g.size();
    if (z == y || a.count(z)) continue;
    if (!d_separated(g, {z}, {y}, a_sub)) continue;
    ++done;
    CHECK(d_separated(g, {z}, {y}, a));
  }
}

TEST_CASE("ancestors of closure members trace back to the base set") {
  std::mt19937_64 rng(49);
  int done = 0;
  while (done < 100) {
    ScopedGraph g = oracle::random_graph(rng, 7, 3);
    NodeSet w = oracle::random_subset(rng, g, {});
    NodeSet cl = closure(g, w);
    NodeSet anc_w;
    for (NodeId v : w)
      for (NodeId u : g.relatives(v, Relation::Ancestors)) anc_w.insert(u);
    ++done;
    for (NodeId v : cl)
      for (NodeId a : g.relatives(v, Relation::Ancestors))
        if (!cl.count(a)) CHECK(anc_w.count(a) > 0);
  }
}
