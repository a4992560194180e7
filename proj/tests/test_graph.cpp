#include "voigraph/graph.hpp"

#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "voigraph/fixtures.hpp"

using namespace voigraph;

TEST_CASE("parse accepts the linear three-node graph") {
  ScopedGraph g = parse_scoped_graph(R"({
    "nodes":[{"name":"Z","kind":"chance"},
             {"name":"X","kind":"decision"},
             {"name":"Y","kind":"utility"}],
    "edges":[["Z","X"],["X","Y"]],
    "contexts":{"X":["Z"]},
    "utility":"Y"})");
  CHECK(g.size() == 3);
  CHECK(g.kind(g.id("X")) == NodeKind::Decision);
  CHECK(g.name(g.utility()) == "Y");
}

TEST_CASE("parse rejects an empty node list with MissingUtility") {
  try {
    parse_scoped_graph(R"({"nodes":[],"edges":[],"contexts":{},"utility":"Y"})");
    FAIL("expected MissingUtility");
  } catch (const VgError& e) {
    CHECK(e.code() == ErrorCode::MissingUtility);
  }
}

TEST_CASE("parse keeps the yes-voi edge set") {
  ScopedGraph g = parse_scoped_graph(R"({
    "nodes":[{"name":"Z","kind":"chance"},
             {"name":"X","kind":"decision"},
             {"name":"Y","kind":"utility"}],
    "edges":[["Z","X"],["X","Y"],["Z","Y"]],
    "contexts":{"X":["Z"]},
    "utility":"Y"})");
  NodeSet pa = g.relatives(g.id("Y"), Relation::Parents);
  CHECK(pa == g.node_set({"X", "Z"}));
}

TEST_CASE("parse rejects context/edge mismatches") {
  try {
    parse_scoped_graph(R"({
      "nodes":[{"name":"Z","kind":"chance"},
               {"name":"X","kind":"decision"},
               {"name":"Y","kind":"utility"}],
      "edges":[["Z","X"],["X","Y"]],
      "contexts":{"X":[]},
      "utility":"Y"})");
    FAIL("expected DecisionParentMismatch");
  } catch (const VgError& e) {
    CHECK(e.code() == ErrorCode::DecisionParentMismatch);
  }
}

TEST_CASE("parse rejects cycles and unknown nodes") {
  try {
    parse_scoped_graph(R"({
      "nodes":[{"name":"A","kind":"chance"},{"name":"Y","kind":"utility"}],
      "edges":[["A","A"]],
      "contexts":{},
      "utility":"Y"})");
    FAIL("expected CycleError");
  } catch (const VgError& e) {
    CHECK(e.code() == ErrorCode::CycleError);
  }
  try {
    parse_scoped_graph(R"({
      "nodes":[{"name":"A","kind":"chance"},{"name":"Y","kind":"utility"}],
      "edges":[["A","B"]],
      "contexts":{},
      "utility":"Y"})");
    FAIL("expected UnknownNode");
  } catch (const VgError& e) {
    CHECK(e.code() == ErrorCode::UnknownNode);
  }
}

TEST_CASE("graph json round-trips") {
  ScopedGraph g = fixture_graph("obstacle-2");
  ScopedGraph g2 = parse_scoped_graph(scoped_graph_to_json(g));
  CHECK(scoped_graph_to_json(g) == scoped_graph_to_json(g2));
}

TEST_CASE("relatives on the linear graph") {
  ScopedGraph g = fixture_graph("linear-no-voi");
  CHECK(g.relatives(g.id("Z"), Relation::Descendants) ==
        g.node_set({"Z", "X", "Y"}));
  CHECK(g.relatives(g.id("Y"), Relation::Parents) == g.node_set({"X"}));
}

TEST_CASE("ancestors match the parent-iteration fixpoint on random DAGs") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    ScopedGraph g = oracle::random_graph(rng, 8, 2);
    for (NodeId v = 0; v < g.size(); ++v) {
      CHECK(g.relatives(v, Relation::Ancestors) ==
            oracle::ancestors_fixpoint(g, v));
    }
  }
}

TEST_CASE("ancestor and descendant views agree") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    ScopedGraph g = oracle::random_graph(rng, 7, 2);
    for (NodeId a = 0; a < g.size(); ++a)
      for (NodeId b = 0; b < g.size(); ++b)
        CHECK(g.relatives(a, Relation::Ancestors).count(b) ==
              g.relatives(b, Relation::Descendants).count(a));
  }
}

TEST_CASE("directed path in yes-voi-no-sr") {
  ScopedGraph g = fixture_graph("yes-voi-no-sr");
  auto p = g.directed_path(g.id("X"), g.id("Y"));
  REQUIRE(p.has_value());
  CHECK(g.path_str(*p) == "X -> Xp -> Y");
}

TEST_CASE("directed path is reflexive") {
  ScopedGraph g = fixture_graph("yes-voi");
  auto p = g.directed_path(g.id("Z"), g.id("Z"));
  REQUIRE(p.has_value());
  CHECK(p->vertices.size() == 1);
}

TEST_CASE("directed path length equals exhaustive shortest distance") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 25; ++trial) {
    ScopedGraph g = oracle::random_graph(rng, 7, 2);
    for (NodeId a = 0; a < g.size(); ++a) {
      for (NodeId b = 0; b < g.size(); ++b) {
        std::size_t best = SIZE_MAX;
        for (const Path& p : oracle::all_simple_paths(g, a, b)) {
          bool directed = true;
          for (std::size_t i = 1; i < p.vertices.size(); ++i)
            if (!g.has_edge(p.vertices[i - 1], p.vertices[i])) directed = false;
          if (directed) best = std::min(best, p.length());
        }
        auto got = g.directed_path(a, b);
        if (a == b) {
          CHECK(got.has_value());
          continue;
        }
        if (best == SIZE_MAX)
          CHECK(!got.has_value());
        else
          CHECK(got->length() == best);
      }
    }
  }
}

TEST_CASE("directed path exists exactly when the target is a descendant") {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 20; ++trial) {
    ScopedGraph g = oracle::random_graph(rng, 7, 2);
    for (NodeId a = 0; a < g.size(); ++a)
      for (NodeId b = 0; b < g.size(); ++b)
        CHECK(g.directed_path(a, b).has_value() ==
              (g.relatives(a, Relation::Descendants).count(b) > 0));
  }
}

TEST_CASE("topological order enumeration") {
  ScopedGraph g = fixture_graph("yes-voi");
  auto orders = g.topological_orders(10);
  CHECK(orders.size() == 1);  // Z before X before Y is forced
  for (const auto& ord : orders)
    for (std::size_t i = 0; i < ord.size(); ++i)
      for (std::size_t j = i + 1; j < ord.size(); ++j)
        CHECK(!g.has_edge(ord[j], ord[i]));
}

TEST_CASE("topological orders respect edges and the limit on random DAGs") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    ScopedGraph g = oracle::random_graph(rng, 6, 2);
    auto orders = g.topological_orders(50);
    CHECK(orders.size() <= 50);
    std::set<std::vector<NodeId>> distinct(orders.begin(), orders.end());
    CHECK(distinct.size() == orders.size());
    for (const auto& ord : orders) {
      std::map<NodeId, std::size_t> pos;
      for (std::size_t i = 0; i < ord.size(); ++i) pos[ord[i]] = i;
      for (NodeId v = 0; v < g.size(); ++v)
        for (NodeId w : g.relatives(v, Relation::Children))
          CHECK(pos[v] < pos[w]);
    }
  }
}
