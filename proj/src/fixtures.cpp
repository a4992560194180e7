#include "voigraph/fixtures.hpp"

#include <algorithm>

namespace voigraph {

namespace {

using NK = NodeKind;
using Nodes = std::vector<std::pair<std::string, NK>>;
using Edges = std::vector<std::pair<std::string, std::string>>;
using Contexts = std::map<std::string, std::vector<std::string>>;

ScopedGraph make(Nodes n, Edges e, Contexts c) {
  return ScopedGraph::build(std::move(n), std::move(e), std::move(c));
}

Rational half() { return Rational(1, 2); }

Variable bit_source(const std::string& name) {
  Variable v;
  v.name = name;
  v.kind = NK::Chance;
  v.bits = 1;
  v.card = 2;
  v.exo_probs = {half(), half()};
  v.fn = Expr::exo(0, 1);
  return v;
}

Variable bits_source(const std::string& name, std::uint32_t bits) {
  Variable v;
  v.name = name;
  v.kind = NK::Chance;
  v.bits = bits;
  v.card = Value(1) << bits;
  v.exo_probs.assign(v.card, Rational(1, static_cast<long>(v.card)));
  for (auto& p : v.exo_probs) p.canonicalize();
  v.fn = Expr::exo(0, bits);
  return v;
}

Variable decision(const std::string& name, std::uint32_t bits,
                  std::vector<std::string> parents) {
  Variable v;
  v.name = name;
  v.kind = NK::Decision;
  v.bits = bits;
  v.card = Value(1) << bits;
  v.parents = std::move(parents);
  return v;
}

Variable chance_fn(const std::string& name, std::uint32_t bits,
                   std::vector<std::string> parents, Expr fn) {
  Variable v;
  v.name = name;
  v.kind = NK::Chance;
  v.bits = bits;
  v.card = Value(1) << bits;
  v.parents = std::move(parents);
  v.fn = std::move(fn);
  return v;
}

Variable utility_var(const std::string& name, std::vector<std::string> parents,
                     Expr fn, std::vector<Rational> values) {
  Variable v;
  v.name = name;
  v.kind = NK::Utility;
  v.card = values.size();
  v.parents = std::move(parents);
  v.fn = std::move(fn);
  v.utility_values = std::move(values);
  return v;
}

Expr in1(const std::string& p) { return Expr::input(p, 0, 1); }

// ---------------------------------------------------------------------------
// Graphs

ScopedGraph graph_yes_voi() {
  return make({{"Z", NK::Chance}, {"X", NK::Decision}, {"Y", NK::Utility}},
              {{"Z", "X"}, {"X", "Y"}, {"Z", "Y"}}, {{"X", {"Z"}}});
}

ScopedGraph graph_linear_no_voi() {
  return make({{"Z", NK::Chance}, {"X", NK::Decision}, {"Y", NK::Utility}},
              {{"Z", "X"}, {"X", "Y"}}, {{"X", {"Z"}}});
}

ScopedGraph graph_yes_voi_no_sr() {
  return make({{"Z", NK::Chance},
               {"X", NK::Decision},
               {"Xp", NK::Decision},
               {"Y", NK::Utility}},
              {{"Z", "X"}, {"X", "Xp"}, {"Xp", "Y"}, {"Z", "Y"}},
              {{"X", {"Z"}}, {"Xp", {"X"}}});
}

ScopedGraph graph_triangle() {
  return make({{"Z", NK::Decision}, {"X", NK::Decision}, {"Y", NK::Utility}},
              {{"Z", "X"}, {"Z", "Y"}, {"X", "Y"}},
              {{"Z", {}}, {"X", {"Z"}}});
}

ScopedGraph graph_soluble() {
  return make({{"Z", NK::Chance},
               {"X", NK::Decision},
               {"Zp", NK::Chance},
               {"Wp", NK::Chance},
               {"Up", NK::Chance},
               {"Xp", NK::Decision},
               {"Y", NK::Utility}},
              {{"Z", "X"},
               {"Z", "Xp"},
               {"X", "Zp"},
               {"Zp", "Xp"},
               {"Zp", "Wp"},
               {"Up", "Wp"},
               {"Wp", "Xp"},
               {"Up", "Y"},
               {"Xp", "Y"},
               {"Z", "Y"}},
              {{"X", {"Z"}}, {"Xp", {"Z", "Zp", "Wp"}}});
}

ScopedGraph graph_remember_decision() {
  return make({{"U", NK::Chance},
               {"Z0", NK::Decision},
               {"X0", NK::Decision},
               {"Y", NK::Utility}},
              {{"U", "Z0"}, {"Z0", "X0"}, {"X0", "Y"}, {"Z0", "Y"}, {"U", "Y"}},
              {{"Z0", {"U"}}, {"X0", {"Z0"}}});
}

ScopedGraph graph_finite_domain() {
  return make({{"Z0", NK::Chance},
               {"U1", NK::Chance},
               {"W1", NK::Chance},
               {"Xp", NK::Decision},
               {"X0", NK::Decision},
               {"Y", NK::Utility}},
              {{"Z0", "X0"},
               {"Z0", "W1"},
               {"Z0", "Xp"},
               {"W1", "Xp"},
               {"Xp", "X0"},
               {"U1", "W1"},
               {"U1", "Y"},
               {"X0", "Y"}},
              {{"Xp", {"Z0", "W1"}}, {"X0", {"Xp", "Z0"}}});
}

ScopedGraph graph_obstacle() {
  return make({{"Z0", NK::Chance},
               {"V", NK::Chance},
               {"X1", NK::Decision},
               {"C", NK::Chance},
               {"X0", NK::Decision},
               {"Y", NK::Utility}},
              {{"Z0", "X1"},
               {"Z0", "C"},
               {"Z0", "X0"},
               {"X1", "C"},
               {"X1", "X0"},
               {"C", "X0"},
               {"C", "Y"},
               {"V", "X1"},
               {"V", "Y"},
               {"X0", "Y"}},
              {{"X1", {"V", "Z0"}}, {"X0", {"C", "X1", "Z0"}}});
}

ScopedGraph graph_superimposed() {
  return make({{"Z0", NK::Chance},
               {"V", NK::Chance},
               {"A1", NK::Chance},
               {"A2", NK::Chance},
               {"A3", NK::Chance},
               {"X1", NK::Decision},
               {"C", NK::Chance},
               {"X2", NK::Decision},
               {"X3", NK::Decision},
               {"X0", NK::Decision},
               {"Y", NK::Utility}},
              {{"Z0", "X1"}, {"Z0", "C"},  {"X1", "C"},  {"X1", "X0"},
               {"C", "X0"},  {"C", "X2"},  {"X2", "X3"}, {"X2", "X0"},
               {"X3", "Y"},  {"X3", "X0"}, {"V", "X1"},  {"V", "Y"},
               {"X0", "Y"},  {"Z0", "X0"}, {"Z0", "X2"}, {"A1", "C"},
               {"A1", "Y"},  {"Z0", "X3"}, {"A2", "X2"}, {"A2", "Y"},
               {"A3", "X3"}, {"A3", "Y"}},
              {{"X1", {"V", "Z0"}},
               {"X2", {"A2", "C", "Z0"}},
               {"X3", {"A3", "X2", "Z0"}},
               {"X0", {"C", "X1", "X2", "X3", "Z0"}}});
}

ScopedGraph graph_thm2_gap() {
  return make({{"Z", NK::Chance},
               {"C", NK::Chance},
               {"X", NK::Decision},
               {"Xpp", NK::Decision},
               {"Y", NK::Utility}},
              {{"Z", "X"},
               {"Z", "Xpp"},
               {"Z", "C"},
               {"C", "Xpp"},
               {"X", "Y"},
               {"Xpp", "Y"},
               {"C", "Y"}},
              {{"X", {"Z"}}, {"Xpp", {"C", "Z"}}});
}

ScopedGraph graph_chain3() {
  return make({{"Z", NK::Chance},
               {"X", NK::Decision},
               {"W", NK::Chance},
               {"Y", NK::Utility}},
              {{"Z", "X"}, {"X", "W"}, {"W", "Y"}, {"Z", "Y"}},
              {{"X", {"Z"}}});
}

ScopedGraph graph_chain4() {
  return make({{"Z", NK::Chance},
               {"X", NK::Decision},
               {"W1", NK::Chance},
               {"W2", NK::Chance},
               {"Y", NK::Utility}},
              {{"Z", "X"}, {"X", "W1"}, {"W1", "W2"}, {"W2", "Y"}, {"Z", "Y"}},
              {{"X", {"Z"}}});
}

ScopedGraph graph_fork_info() {
  return make({{"V", NK::Chance},
               {"Z", NK::Chance},
               {"X", NK::Decision},
               {"Y", NK::Utility}},
              {{"V", "Z"}, {"Z", "X"}, {"X", "Y"}, {"V", "Y"}},
              {{"X", {"Z"}}});
}

ScopedGraph graph_two_collider() {
  return make({{"Z", NK::Chance},
               {"U1", NK::Chance},
               {"U2", NK::Chance},
               {"W1", NK::Chance},
               {"W2", NK::Chance},
               {"X", NK::Decision},
               {"Y", NK::Utility}},
              {{"Z", "X"},
               {"W1", "X"},
               {"W2", "X"},
               {"Z", "W1"},
               {"U1", "W1"},
               {"U1", "W2"},
               {"U2", "W2"},
               {"U2", "Y"},
               {"X", "Y"}},
              {{"X", {"W1", "W2", "Z"}}});
}

ScopedGraph graph_two_context() {
  return make({{"Z1", NK::Chance},
               {"Z2", NK::Chance},
               {"X", NK::Decision},
               {"Y", NK::Utility}},
              {{"Z1", "X"}, {"Z2", "X"}, {"Z1", "Y"}, {"Z2", "Y"}, {"X", "Y"}},
              {{"X", {"Z1", "Z2"}}});
}

ScopedGraph graph_remember_long() {
  return make({{"U", NK::Chance},
               {"Z0", NK::Decision},
               {"X0", NK::Decision},
               {"W", NK::Chance},
               {"Y", NK::Utility}},
              {{"U", "Z0"},
               {"Z0", "X0"},
               {"X0", "W"},
               {"W", "Y"},
               {"Z0", "Y"},
               {"U", "Y"}},
              {{"Z0", {"U"}}, {"X0", {"Z0"}}});
}

ScopedGraph graph_insoluble_ext() {
  return make({{"Z", NK::Chance},
               {"X", NK::Decision},
               {"Xp", NK::Decision},
               {"W", NK::Chance},
               {"Y", NK::Utility}},
              {{"Z", "X"}, {"X", "Xp"}, {"Xp", "W"}, {"W", "Y"}, {"Z", "Y"}},
              {{"X", {"Z"}}, {"Xp", {"X"}}});
}

ScopedGraph graph_decision_gate() {
  return make({{"B", NK::Chance},
               {"Z0", NK::Chance},
               {"X0", NK::Decision},
               {"X1", NK::Decision},
               {"Y", NK::Utility}},
              {{"B", "X0"}, {"Z0", "X0"}, {"X0", "X1"}, {"X1", "Y"},
               {"B", "Y"}, {"Z0", "Y"}},
              {{"X0", {"B", "Z0"}}, {"X1", {"X0"}}});
}

// ---------------------------------------------------------------------------
// Hand-written SCMs from the figures

FiniteSCM scm_yes_voi() {
  FiniteSCM m;
  m.variables.push_back(bit_source("Z"));
  m.variables.push_back(decision("X", 1, {"Z"}));
  m.variables.push_back(utility_var("Y", {"X", "Z"}, Expr::eq(in1("Z"), in1("X")),
                                    {Rational(0), Rational(1)}));
  m.validate();
  return m;
}

FiniteSCM scm_yes_voi_no_sr() {
  FiniteSCM m;
  m.variables.push_back(bit_source("Z"));
  m.variables.push_back(decision("X", 1, {"Z"}));
  m.variables.push_back(decision("Xp", 1, {"X"}));
  m.variables.push_back(utility_var("Y", {"Xp", "Z"}, Expr::eq(in1("Z"), in1("Xp")),
                                    {Rational(0), Rational(1)}));
  m.validate();
  return m;
}

FiniteSCM scm_soluble_material() {
  // Fig. 4(b): W' presents the Z'-indexed bit of U'; the outcome pays for
  // naming Z and for reproducing a bit of U' with its index.
  FiniteSCM m;
  m.variables.push_back(bit_source("Z"));
  m.variables.push_back(decision("X", 1, {"Z"}));
  m.variables.push_back(chance_fn("Zp", 1, {"X"}, in1("X")));
  m.variables.push_back(bits_source("Up", 2));
  m.variables.push_back(chance_fn(
      "Wp", 2, {"Up", "Zp"},
      Expr::cat({in1("Zp"), Expr::idx(Expr::input("Up", 0, 2), in1("Zp"))})));
  m.variables.push_back(decision("Xp", 2, {"Z", "Zp", "Wp"}));
  m.variables.push_back(utility_var(
      "Y", {"Up", "Xp", "Z"},
      Expr::cat({Expr::eq(in1("Z"), Expr::input("Xp", 0, 1)),
                 Expr::eq(Expr::idx(Expr::input("Up", 0, 2),
                                    Expr::input("Xp", 0, 1)),
                          Expr::input("Xp", 1, 1))}),
      {Rational(0), Rational(1), Rational(1), Rational(2)}));
  m.validate();
  return m;
}

FiniteSCM scm_remember_decision(bool material) {
  FiniteSCM m;
  m.variables.push_back(bit_source("U"));
  m.variables.push_back(decision("Z0", 1, {"U"}));
  m.variables.push_back(decision("X0", 1, {"Z0"}));
  Expr target = material ? in1("U") : in1("Z0");
  m.variables.push_back(utility_var("Y", {"U", "X0", "Z0"},
                                    Expr::eq(std::move(target), in1("X0")),
                                    {Rational(0), Rational(1)}));
  m.validate();
  return m;
}

FiniteSCM scm_finite_domain_1() {
  FiniteSCM m;
  m.variables.push_back(bit_source("Z0"));
  m.variables.push_back(bit_source("U1"));
  m.variables.push_back(chance_fn("W1", 1, {"U1", "Z0"},
                                  Expr::bxor(in1("Z0"), in1("U1"))));
  m.variables.push_back(decision("Xp", 1, {"W1", "Z0"}));
  m.variables.push_back(decision("X0", 1, {"Xp", "Z0"}));
  m.variables.push_back(utility_var("Y", {"U1", "X0"},
                                    Expr::eq(in1("U1"), in1("X0")),
                                    {Rational(0), Rational(1)}));
  m.validate();
  return m;
}

FiniteSCM scm_finite_domain_2() {
  FiniteSCM m;
  m.variables.push_back(bit_source("Z0"));
  m.variables.push_back(bits_source("U1", 2));
  m.variables.push_back(chance_fn("W1", 1, {"U1", "Z0"},
                                  Expr::idx(Expr::input("U1", 0, 2), in1("Z0"))));
  m.variables.push_back(decision("Xp", 1, {"W1", "Z0"}));
  m.variables.push_back(decision("X0", 2, {"Xp", "Z0"}));
  m.variables.push_back(utility_var(
      "Y", {"U1", "X0"},
      Expr::eq(Expr::idx(Expr::input("U1", 0, 2), Expr::input("X0", 0, 1)),
               Expr::input("X0", 1, 1)),
      {Rational(0), Rational(1)}));
  m.validate();
  return m;
}

Variable noisy_copy_bit(const std::string& name, std::vector<std::string> parents,
                        const std::string& copied) {
  // P(value = copied) = 99/100, flipped otherwise.
  Variable v;
  v.name = name;
  v.kind = NK::Chance;
  v.bits = 1;
  v.card = 2;
  v.parents = std::move(parents);
  v.exo_probs = {Rational(99, 100), Rational(1, 100)};
  v.fn = Expr::bxor(in1(copied), Expr::exo(0, 1));
  return v;
}

FiniteSCM scm_obstacle_1() {
  FiniteSCM m;
  m.variables.push_back(bit_source("Z0"));
  m.variables.push_back(bits_source("V", 2));
  m.variables.push_back(decision("X1", 2, {"V", "Z0"}));
  m.variables.push_back(chance_fn(
      "C", 2, {"X1", "Z0"}, Expr::cat({Expr::input("X1", 0, 1), in1("Z0")})));
  m.variables.push_back(decision("X0", 2, {"C", "X1", "Z0"}));
  m.variables.push_back(utility_var(
      "Y", {"C", "V", "X0"},
      Expr::cat({Expr::eq(Expr::idx(Expr::input("V", 0, 2),
                                    Expr::input("X0", 0, 1)),
                          Expr::input("X0", 1, 1)),
                 Expr::eq(Expr::input("C", 0, 1), Expr::input("C", 1, 1))}),
      {Rational(0), Rational(1), Rational(1), Rational(2)}));
  m.validate();
  return m;
}

FiniteSCM scm_obstacle_2() {
  FiniteSCM m;
  m.variables.push_back(bit_source("Z0"));
  m.variables.push_back(bits_source("V", 2));
  m.variables.push_back(decision("X1", 1, {"V", "Z0"}));
  m.variables.push_back(noisy_copy_bit("C", {"X1", "Z0"}, "Z0"));
  m.variables.push_back(decision("X0", 2, {"C", "X1", "Z0"}));
  m.variables.push_back(utility_var(
      "Y", {"C", "V", "X0"},
      Expr::cat({Expr::eq(Expr::idx(Expr::input("V", 0, 2),
                                    Expr::input("X0", 0, 1)),
                          Expr::input("X0", 1, 1)),
                 Expr::eq(in1("C"), Expr::input("X0", 0, 1))}),
      {Rational(0), Rational(1), Rational(10), Rational(11)}));
  m.validate();
  return m;
}

FiniteSCM scm_superimposed() {
  FiniteSCM m;
  m.variables.push_back(bit_source("Z0"));
  m.variables.push_back(bits_source("V", 2));
  m.variables.push_back(bit_source("A1"));
  m.variables.push_back(bit_source("A2"));
  m.variables.push_back(bit_source("A3"));
  m.variables.push_back(decision("X1", 1, {"V", "Z0"}));
  m.variables.push_back(noisy_copy_bit("C", {"A1", "X1", "Z0"}, "Z0"));
  m.variables.push_back(decision("X2", 1, {"A2", "C", "Z0"}));
  m.variables.push_back(decision("X3", 1, {"A3", "X2", "Z0"}));
  m.variables.push_back(decision("X0", 2, {"C", "X1", "X2", "X3", "Z0"}));
  m.variables.push_back(utility_var(
      "Y", {"A1", "A2", "A3", "V", "X0", "X3"},
      Expr::cat({Expr::eq(Expr::idx(Expr::input("V", 0, 2),
                                    Expr::input("X0", 0, 1)),
                          Expr::input("X0", 1, 1)),
                 Expr::eq(in1("X3"), Expr::input("X0", 0, 1))}),
      {Rational(0), Rational(1), Rational(10), Rational(11)}));
  m.validate();
  return m;
}

struct FixtureDef {
  std::string name;
  ScopedGraph (*graph)();
  FiniteSCM (*scm)();  // may be null
  const char* target_decision;
  const char* target_context;
};

FiniteSCM scm_remember_decision_1() { return scm_remember_decision(false); }
FiniteSCM scm_remember_decision_2() { return scm_remember_decision(true); }

const std::vector<FixtureDef>& defs() {
  static const std::vector<FixtureDef> table = {
      {"yes-voi", graph_yes_voi, scm_yes_voi, "X", "Z"},
      {"linear-no-voi", graph_linear_no_voi, nullptr, "X", "Z"},
      {"yes-voi-no-sr", graph_yes_voi_no_sr, scm_yes_voi_no_sr, "Xp", "X"},
      {"triangle", graph_triangle, nullptr, "X", "Z"},
      {"soluble", graph_soluble, scm_soluble_material, "X", "Z"},
      {"remember-decision-1", graph_remember_decision, scm_remember_decision_1,
       "X0", "Z0"},
      {"remember-decision-2", graph_remember_decision, scm_remember_decision_2,
       "X0", "Z0"},
      {"finite-domain-1", graph_finite_domain, scm_finite_domain_1, "X0", "Z0"},
      {"finite-domain-2", graph_finite_domain, scm_finite_domain_2, "X0", "Z0"},
      {"obstacle-1", graph_obstacle, scm_obstacle_1, "X0", "Z0"},
      {"obstacle-2", graph_obstacle, scm_obstacle_2, "X0", "Z0"},
      {"superimposed", graph_superimposed, scm_superimposed, "X0", "Z0"},
      {"thm2-gap", graph_thm2_gap, nullptr, "X", "Z"},
      {"chain3", graph_chain3, nullptr, "X", "Z"},
      {"chain4", graph_chain4, nullptr, "X", "Z"},
      {"fork-info", graph_fork_info, nullptr, "X", "Z"},
      {"two-collider", graph_two_collider, nullptr, "X", "Z"},
      {"two-context", graph_two_context, nullptr, "X", "Z1"},
      {"remember-long", graph_remember_long, nullptr, "X0", "Z0"},
      {"insoluble-ext", graph_insoluble_ext, nullptr, "Xp", "X"},
      {"decision-gate", graph_decision_gate, nullptr, "X0", "Z0"},
  };
  return table;
}

const FixtureDef& def(const std::string& name) {
  for (const auto& d : defs())
    if (d.name == name) return d;
  fail(ErrorCode::UnknownNode, "unknown fixture: " + name);
}

}  // namespace

std::vector<std::string> fixture_names() {
  std::vector<std::string> out;
  for (const auto& d : defs()) out.push_back(d.name);
  return out;
}

bool has_fixture(const std::string& name) {
  for (const auto& d : defs())
    if (d.name == name) return true;
  return false;
}

ScopedGraph fixture_graph(const std::string& name) { return def(name).graph(); }

std::optional<FiniteSCM> fixture_scm(const std::string& name) {
  const auto& d = def(name);
  if (!d.scm) return std::nullopt;
  return d.scm();
}

std::optional<std::pair<std::string, std::string>> fixture_target(
    const std::string& name) {
  const auto& d = def(name);
  if (!d.target_decision) return std::nullopt;
  return std::make_pair(std::string(d.target_decision),
                        std::string(d.target_context));
}

std::vector<std::pair<std::string, std::pair<std::string, std::string>>>
thm1_fixtures() {
  std::vector<std::pair<std::string, std::pair<std::string, std::string>>> out;
  for (const char* name :
       {"yes-voi", "yes-voi-no-sr", "remember-decision-2", "finite-domain-2",
        "chain3", "chain4", "fork-info", "two-collider", "two-context",
        "remember-long", "insoluble-ext", "decision-gate"}) {
    auto t = fixture_target(name);
    out.emplace_back(name, *t);
  }
  return out;
}

}  // namespace voigraph
