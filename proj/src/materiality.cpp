#include "voigraph/materiality.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>

#include "voigraph/bitstring.hpp"

namespace voigraph {

namespace {

NodeSet to_set(const std::vector<NodeId>& v) { return NodeSet(v.begin(), v.end()); }

bool on_path(const Path& p, NodeId v) {
  return std::find(p.vertices.begin(), p.vertices.end(), v) != p.vertices.end();
}

std::size_t pos_on(const Path& p, NodeId v) {
  auto it = std::find(p.vertices.begin(), p.vertices.end(), v);
  require(it != p.vertices.end(), ErrorCode::InternalAssertion,
          "vertex not on path");
  return static_cast<std::size_t>(it - p.vertices.begin());
}

}  // namespace

NodeId chance_parent(const ScopedGraph& g, NodeId z) {
  require(g.is_decision(z), ErrorCode::PreconditionViolated,
          g.name(z) + " is not a decision");
  NodeSet cond = thm1_condition_c_set(g, z);
  for (NodeId n : g.contexts(z))
    if (!g.is_decision(n) && !cond.count(n)) return n;
  fail(ErrorCode::LemmaHypothesisFailed,
       "no non-decision context of " + g.name(z) +
           " outside the closure; condition (C) cannot hold");
}

namespace {

// Info-path search fallback: the lexicographically least shortest path
// Z --- Y active given cond, constrained to begin with the given edge when
// one is required.
std::optional<Path> constrained_witness(const ScopedGraph& g, NodeId z, NodeId y,
                                        const NodeSet& cond,
                                        std::optional<NodeId> first_hop) {
  if (!first_hop) return active_path_witness(g, z, y, cond);
  // Search from the hop and prepend; the hop must stay off the rest.
  auto rest = active_path_witness(g, *first_hop, y, cond);
  if (!rest) return std::nullopt;
  // Reject and retry via exhaustive scan if z re-appears.
  if (!on_path(*rest, z)) {
    std::vector<NodeId> v{z};
    v.insert(v.end(), rest->vertices.begin(), rest->vertices.end());
    Path p = g.make_path(v);
    if (is_active_path(g, p, cond)) return p;
  }
  // Exhaustive fallback: enumerate shortest active paths from z and filter
  // on the first hop.
  auto direct = active_path_witness(g, z, y, cond);
  if (direct && direct->vertices.size() >= 2 && direct->vertices[1] == *first_hop)
    return direct;
  return std::nullopt;
}

}  // namespace

Path info_path(const ScopedGraph& g, NodeId z) {
  NodeId y = g.utility();
  NodeSet cond = thm1_condition_c_set(g, z);
  require(!cond.count(z), ErrorCode::LemmaHypothesisFailed,
          g.name(z) + " is implied by the conditioning closure");

  if (!g.is_decision(z)) {
    auto m = active_path_witness(g, z, y, cond);
    require(m.has_value(), ErrorCode::LemmaHypothesisFailed,
            "no active info path from " + g.name(z) +
                "; conditions (B-C) cannot hold");
    return *m;
  }

  // Decision context: the path must begin Z <- N with a chance parent N, per
  // the backdoor lemma. Primary route: truncate the condition-(C) witness
  // for the pair (Z, N); repair at the first unactivated collider if needed;
  // fall back to a constrained search.
  NodeId n = chance_parent(g, z);
  NodeSet cond_n = thm1_condition_c_set(g, n);
  std::optional<Path> candidate;
  if (auto base = active_path_witness(g, n, y, cond_n)) {
    if (!on_path(*base, z)) {
      std::vector<NodeId> v{z};
      v.insert(v.end(), base->vertices.begin(), base->vertices.end());
      Path p = g.make_path(v);
      if (is_active_path(g, p, cond)) candidate = p;  // case 1
      if (!candidate) {
        // Case 2: truncate at the collider nearest Z that lost activation
        // under cond, then reroute through a decision it still influences.
        for (std::size_t i = 1; i + 1 < p.vertices.size() && !candidate; ++i) {
          if (p.shapes[i] != Shape::Collider) continue;
          NodeId m_vertex = p.vertices[i];
          NodeSet desc = g.relatives(m_vertex, Relation::Descendants);
          bool active = std::any_of(desc.begin(), desc.end(), [&](NodeId d) {
            return cond.count(d) > 0;
          });
          if (active) continue;
          for (NodeId xprime : g.decisions()) {
            if (xprime == z || !desc.count(xprime)) continue;
            auto mid = g.directed_path(m_vertex, xprime);
            auto tail = g.directed_path(xprime, y);
            if (!mid || !tail) continue;
            std::vector<NodeId> v2(p.vertices.begin(),
                                   p.vertices.begin() + static_cast<long>(i));
            for (NodeId w : mid->vertices) v2.push_back(w);
            for (std::size_t k2 = 1; k2 < tail->vertices.size(); ++k2)
              v2.push_back(tail->vertices[k2]);
            // Shortcut repeats, keeping the first occurrences.
            std::vector<NodeId> simple;
            for (NodeId w : v2) {
              auto it = std::find(simple.begin(), simple.end(), w);
              if (it != simple.end())
                simple.erase(it + 1, simple.end());
              else
                simple.push_back(w);
            }
            if (simple.size() < 2 || simple.front() != z) continue;
            Path p2 = g.make_path(simple);
            if (is_active_path(g, p2, cond) && p2.vertices[1] == n) {
              candidate = p2;
              break;
            }
          }
        }
      }
    }
  }
  if (!candidate) candidate = constrained_witness(g, z, y, cond, n);
  require(candidate.has_value(), ErrorCode::LemmaHypothesisFailed,
          "no info path beginning " + g.name(z) + " <- " + g.name(n));
  require(candidate->vertices.size() >= 2 && candidate->vertices[1] == n &&
              g.has_edge(n, z),
          ErrorCode::InternalAssertion, "info path does not begin Z <- N");
  require(is_active_path(g, *candidate, cond), ErrorCode::InternalAssertion,
          "constructed info path is not active");
  return *candidate;
}

MaterialityPaths build_materiality_paths(const ScopedGraph& g, NodeId x0, NodeId z0) {
  NodeId y = g.utility();
  Thm1Report t = thm1_conditions(g);
  require(t.all(), ErrorCode::LemmaHypothesisFailed,
          "theorem conditions A-C do not all hold");
  const auto& ctx0 = g.contexts(x0);
  require(std::find(ctx0.begin(), ctx0.end(), z0) != ctx0.end(),
          ErrorCode::NotAContext,
          g.name(z0) + " is not a context of " + g.name(x0));

  MaterialityPaths mp;
  mp.x0 = x0;
  mp.z0 = z0;

  // Control path: A -> Z0 -> X0 -> ... -> Y, rejecting candidates through
  // other parents of X0. The prefix has length zero or one.
  std::vector<NodeId> d_vertices;
  if (g.is_decision(z0)) d_vertices.push_back(chance_parent(g, z0));
  d_vertices.push_back(z0);
  d_vertices.push_back(x0);
  NodeSet forbidden;
  for (NodeId p : g.contexts(x0))
    if (p != z0) forbidden.insert(p);
  auto tail = g.directed_path_avoiding(x0, y, forbidden);
  require(tail.has_value(), ErrorCode::NoControlPath,
          "no directed path from " + g.name(x0) + " to the utility");
  for (std::size_t i = 1; i < tail->vertices.size(); ++i)
    d_vertices.push_back(tail->vertices[i]);
  mp.control = g.make_path(d_vertices);
  for (std::size_t i = 0; i < d_vertices.size(); ++i)
    require(d_vertices[i] == z0 || !forbidden.count(d_vertices[i]),
            ErrorCode::InternalAssertion,
            "control path passes a non-Z0 parent of X0");

  // Decisions along d and their parents along d.
  std::vector<std::pair<NodeId, NodeId>> dec;  // (X_i, Z_i) in path order
  for (std::size_t i = 1; i < d_vertices.size(); ++i)
    if (g.is_decision(d_vertices[i]))
      dec.emplace_back(d_vertices[i], d_vertices[i - 1]);
  std::size_t x0_pos = 0;
  for (std::size_t i = 0; i < dec.size(); ++i)
    if (dec[i].first == x0) x0_pos = i;
  mp.i_min = -static_cast<int>(x0_pos);
  mp.i_max = static_cast<int>(dec.size() - 1 - x0_pos);
  require(dec[x0_pos].second == z0, ErrorCode::InternalAssertion,
          "Z0 is not the parent of X0 along d");

  for (std::size_t i = 0; i < dec.size(); ++i) {
    MaterialityPaths::InfoPath ip;
    ip.index = static_cast<int>(i) - static_cast<int>(x0_pos);
    ip.decision = dec[i].first;
    ip.context = dec[i].second;
    ip.full = info_path(g, ip.context);

    // Intersection node: longest common prefix of m'_i with d walked
    // backward from Z_i.
    std::size_t zpos = pos_on(mp.control, ip.context);
    std::size_t common = 0;
    while (common + 1 < ip.full.vertices.size() && common < zpos &&
           ip.full.vertices[common + 1] == mp.control.vertices[zpos - 1 - common])
      ++common;
    ip.intersection = ip.full.vertices[common];
    ip.truncated = g.make_path(std::vector<NodeId>(
        ip.full.vertices.begin() + static_cast<long>(common),
        ip.full.vertices.end()));

    // Fork / collider decomposition of the truncated path.
    const Path& m = ip.truncated;
    ip.starts_into_t = g.has_edge(m.vertices[1], m.vertices[0]);
    if (ip.starts_into_t) ip.colliders.push_back(ip.intersection);
    for (std::size_t j = 1; j + 1 < m.vertices.size(); ++j) {
      if (m.shapes[j] == Shape::Fork) ip.forks.push_back(m.vertices[j]);
      if (m.shapes[j] == Shape::Collider) ip.colliders.push_back(m.vertices[j]);
    }
    require(ip.forks.size() == ip.colliders.size(), ErrorCode::InternalAssertion,
            "info path fork/collider decomposition mismatch");

    for (NodeId w : ip.colliders) {
      auto r = g.directed_path(w, y);
      require(r.has_value(), ErrorCode::InternalAssertion,
              "collider " + g.name(w) + " has no directed path to the utility");
      ip.auxiliary.push_back(*r);
    }
    mp.info.push_back(std::move(ip));
  }

  validate_materiality_paths(g, mp);
  return mp;
}

void validate_materiality_paths(const ScopedGraph& g, const MaterialityPaths& mp) {
  NodeId y = g.utility();
  const auto& d = mp.control.vertices;
  require(!d.empty() && d.back() == y, ErrorCode::InternalAssertion,
          "control path does not end at the utility");
  require(!g.is_decision(d.front()), ErrorCode::InternalAssertion,
          "control path does not start at a non-decision");
  for (std::size_t i = 1; i < d.size(); ++i)
    require(g.has_edge(d[i - 1], d[i]), ErrorCode::InternalAssertion,
            "control path is not directed");
  for (NodeId v : d) {
    if (v == mp.z0) continue;
    const auto& ctx = g.contexts(mp.x0);
    require(std::find(ctx.begin(), ctx.end(), v) == ctx.end(),
            ErrorCode::InternalAssertion,
            "control path contains a parent of X0 other than Z0");
  }

  require(mp.info.size() ==
              static_cast<std::size_t>(mp.i_max - mp.i_min + 1),
          ErrorCode::InternalAssertion, "info path index range mismatch");
  for (const auto& ip : mp.info) {
    NodeSet cond = thm1_condition_c_set(g, ip.context);
    require(is_active_path(g, ip.full, cond), ErrorCode::InternalAssertion,
            "info path for " + g.name(ip.context) + " is not active");
    require(ip.full.vertices.front() == ip.context &&
                ip.full.vertices.back() == y,
            ErrorCode::InternalAssertion, "info path endpoints wrong");
    if (g.is_decision(ip.context)) {
      require(ip.full.vertices.size() >= 2, ErrorCode::InternalAssertion, "");
      NodeId n = ip.full.vertices[1];
      require(g.has_edge(n, ip.context) && !g.is_decision(n),
              ErrorCode::InternalAssertion,
              "decision context's info path must begin Z <- N, N non-decision");
    }
    // Departure-point maximality: the next full-path vertex after T_i must
    // not extend the common backward segment along d.
    std::size_t zpos = pos_on(mp.control, ip.context);
    std::size_t tpos = pos_on(ip.full, ip.intersection);
    require(tpos + 1 < ip.full.vertices.size(), ErrorCode::InternalAssertion,
            "intersection node cannot be the utility");
    if (zpos >= tpos + 1)
      require(ip.full.vertices[tpos + 1] != mp.control.vertices[zpos - tpos - 1],
              ErrorCode::InternalAssertion,
              "intersection node is not maximal");
    require(ip.truncated.vertices.front() == ip.intersection,
            ErrorCode::InternalAssertion, "truncated path must start at T_i");
    for (std::size_t j = 0; j < ip.colliders.size(); ++j) {
      const Path& r = ip.auxiliary[j];
      require(r.vertices.front() == ip.colliders[j] && r.vertices.back() == y,
              ErrorCode::InternalAssertion, "auxiliary path endpoints wrong");
      for (std::size_t k2 = 1; k2 < r.vertices.size(); ++k2)
        require(g.has_edge(r.vertices[k2 - 1], r.vertices[k2]),
                ErrorCode::InternalAssertion, "auxiliary path is not directed");
    }
  }
}

SynthesisParams compute_params(const ScopedGraph& g, const MaterialityPaths& mp,
                               std::optional<std::uint32_t> k_override) {
  SynthesisParams p;
  p.b = 1;
  for (NodeId x : g.decisions())
    p.b = std::max(p.b, g.contexts(x).size());

  std::map<NodeId, std::size_t> through;
  auto count_path = [&](const Path& path) {
    for (NodeId v : path.vertices) ++through[v];
  };
  count_path(mp.control);
  for (const auto& ip : mp.info) {
    count_path(ip.truncated);
    for (const auto& r : ip.auxiliary) count_path(r);
  }
  p.c = 1;
  for (const auto& [v, n] : through) p.c = std::max(p.c, n);

  if (k_override) {
    p.k = *k_override;
    require(p.k >= 1, ErrorCode::PreconditionViolated, "k override must be >= 1");
    p.k_overridden = true;
    return p;
  }
  std::uint32_t k = 1;
  while (k < 63 && !((std::uint64_t(1) << k) >
                     (std::uint64_t(k) + p.c) * std::uint64_t(p.b) * p.c))
    ++k;
  require(k < 63, ErrorCode::DomainExplosion, "no feasible k below 63 bits");
  p.k = k;
  return p;
}

// ---------------------------------------------------------------------------
// SCM synthesis

namespace {

constexpr std::uint32_t kMaxVarBits = 20;

struct PathRef {
  enum class Kind { Control, Info, Aux } kind;
  int i = 0;       // info index
  std::size_t j = 0;  // aux index within its info path (0-based)

  bool operator<(const PathRef& o) const {
    auto key = [](const PathRef& p) {
      return std::tuple<int, int, std::size_t>(
          p.kind == Kind::Control ? 0 : p.kind == Kind::Info ? 1 : 2, p.i, p.j);
    };
    return key(*this) < key(o);
  }
  bool operator==(const PathRef& o) const {
    return kind == o.kind && i == o.i && j == o.j;
  }
  std::string str() const {
    std::ostringstream os;
    if (kind == Kind::Control) return "d";
    os << (kind == Kind::Info ? "m" : "r") << i;
    if (kind == Kind::Aux) os << "." << (j + 1);
    return os.str();
  }
};

struct Component {
  PathRef path;
  std::uint32_t width = 0;
  std::uint32_t offset = 0;      // within the variable's value
  std::uint32_t exo_offset = 0;  // within the variable's exo draw, if sourced
  bool exo_sourced = false;
};

struct Synth {
  const ScopedGraph& g;
  const MaterialityPaths& mp;
  const SynthesisParams& params;

  std::vector<std::pair<PathRef, const Path*>> paths;
  std::map<NodeId, std::vector<Component>> comps;
  std::map<NodeId, std::uint32_t> exo_bits;
  std::map<int, std::vector<PathRef>> sp;      // bundle paths through T_i
  std::map<int, std::uint32_t> base;           // k + |sp_i| - 1

  const Path& path_of(const PathRef& ref) const {
    for (const auto& [r, p] : paths)
      if (r == ref) return *p;
    fail(ErrorCode::InternalAssertion, "unknown path ref");
  }

  std::optional<NodeId> parent_along(const PathRef& ref, NodeId v) const {
    const Path& p = path_of(ref);
    std::size_t pos = pos_on(p, v);
    if (ref.kind == PathRef::Kind::Control || ref.kind == PathRef::Kind::Aux) {
      if (pos == 0) return std::nullopt;
      return p.vertices[pos - 1];
    }
    fail(ErrorCode::InternalAssertion, "parent_along is for directed paths");
  }

  const Component* find_comp(NodeId v, const PathRef& ref) const {
    auto it = comps.find(v);
    if (it == comps.end()) return nullptr;
    for (const auto& c : it->second)
      if (c.path == ref) return &c;
    return nullptr;
  }
  const Component& comp(NodeId v, const PathRef& ref) const {
    const Component* c = find_comp(v, ref);
    require(c != nullptr, ErrorCode::InternalAssertion,
            "missing component " + ref.str() + " on " + g.name(v));
    return *c;
  }

  std::uint32_t var_bits(NodeId v) const {
    std::uint32_t total = 0;
    auto it = comps.find(v);
    if (it != comps.end())
      for (const auto& c : it->second) total += c.width;
    return total;
  }

  Expr read_comp(NodeId v, const PathRef& ref) const {
    const Component& c = comp(v, ref);
    return Expr::input(g.name(v), c.offset, c.width);
  }

  // Value carried into v along a control or auxiliary path: the parent's
  // component, the exogenous draw at the control source, or the collider's
  // own info-path component at an auxiliary source.
  Expr arriving(NodeId v, const PathRef& ref) const {
    if (ref.kind == PathRef::Kind::Control) {
      auto par = parent_along(ref, v);
      if (!par) {
        const Component& c = comp(v, ref);
        require(c.exo_sourced, ErrorCode::InternalAssertion,
                "control source without exogenous draw");
        return Expr::exo(c.exo_offset, c.width);
      }
      return read_comp(*par, ref);
    }
    auto par = parent_along(ref, v);
    require(par.has_value(), ErrorCode::InternalAssertion,
            "arriving value requested at an aux source");
    const Path& r = path_of(ref);
    if (*par == r.vertices.front()) {
      // First hop after the collider: read its info-path component.
      PathRef m{PathRef::Kind::Info, ref.i, 0};
      return read_comp(*par, m);
    }
    return read_comp(*par, ref);
  }

  // The bundle T_i^{sp_i} as carried by T_i's own value.
  Expr bundle_outgoing(int i) const {
    NodeId t = mp.at(i).intersection;
    std::vector<Expr> parts;
    for (const auto& ref : sp.at(i)) parts.push_back(read_comp(t, ref));
    return Expr::cat(std::move(parts));
  }

  // The bundle as it arrives at T_i (parents' components / exogenous draw).
  Expr bundle_arriving(int i) const {
    NodeId t = mp.at(i).intersection;
    std::vector<Expr> parts;
    for (const auto& ref : sp.at(i)) parts.push_back(arriving(t, ref));
    return Expr::cat(std::move(parts));
  }
};

}  // namespace

MaterialityScm build_materiality_scm(const ScopedGraph& g, const MaterialityPaths& mp,
                                     const SynthesisParams& params) {
  validate_materiality_paths(g, mp);
  {
    SynthesisParams check = compute_params(g, mp, std::nullopt);
    require(check.b == params.b && check.c == params.c,
            ErrorCode::PreconditionViolated,
            "params b/c do not match the paths");
    require(params.k_overridden || params.k == check.k,
            ErrorCode::PreconditionViolated, "params k mismatch");
  }

  Synth s{g, mp, params};
  const std::uint32_t k = params.k;
  NodeId y = g.utility();

  // Deterministic path enumeration order: d, m_i, then r_{i,j}.
  s.paths.emplace_back(PathRef{PathRef::Kind::Control, 0, 0}, &mp.control);
  for (const auto& ip : mp.info)
    s.paths.emplace_back(PathRef{PathRef::Kind::Info, ip.index, 0}, &ip.truncated);
  for (const auto& ip : mp.info)
    for (std::size_t j = 0; j < ip.auxiliary.size(); ++j)
      s.paths.emplace_back(PathRef{PathRef::Kind::Aux, ip.index, j},
                           &ip.auxiliary[j]);

  // Bundle paths through each intersection node: the control path plus every
  // auxiliary path passing through it away from its own source.
  for (const auto& ip : mp.info) {
    std::vector<PathRef> bundle{PathRef{PathRef::Kind::Control, 0, 0}};
    for (const auto& [ref, path] : s.paths) {
      if (ref.kind != PathRef::Kind::Aux) continue;
      if (!on_path(*path, ip.intersection)) continue;
      if (path->vertices.front() == ip.intersection) continue;
      bundle.push_back(ref);
    }
    std::sort(bundle.begin(), bundle.end());
    s.sp[ip.index] = bundle;
    s.base[ip.index] = k + static_cast<std::uint32_t>(bundle.size()) - 1;
  }

  // Component layout pass. Widths are fixed by role; offsets follow the
  // path enumeration order.
  auto add_comp = [&](NodeId v, const PathRef& ref, std::uint32_t width,
                      bool exo_sourced) {
    if (width == 0) return;
    Component c;
    c.path = ref;
    c.width = width;
    c.exo_sourced = exo_sourced;
    s.comps[v].push_back(c);
  };

  // Control path: k bits everywhere, exogenous at the source.
  {
    PathRef d{PathRef::Kind::Control, 0, 0};
    for (std::size_t i = 0; i < mp.control.vertices.size(); ++i) {
      NodeId v = mp.control.vertices[i];
      if (v == y) continue;
      add_comp(v, d, k, i == 0);
    }
  }
  // Info paths.
  for (const auto& ip : mp.info) {
    PathRef mref{PathRef::Kind::Info, ip.index, 0};
    const std::uint32_t base_i = s.base.at(ip.index);
    const Path& m = ip.truncated;

    // Fork widths grow as the exp2 tower over the bundle width.
    std::map<NodeId, std::uint32_t> fork_no;
    for (std::size_t j = 0; j < ip.forks.size(); ++j)
      fork_no[ip.forks[j]] = static_cast<std::uint32_t>(j + 1);
    std::map<NodeId, std::uint32_t> collider_no;
    for (std::size_t j = 0; j < ip.colliders.size(); ++j)
      collider_no[ip.colliders[j]] = static_cast<std::uint32_t>(j + 1);

    // Segment widths propagate by copy; walk the path and assign.
    // carried[v] = width of the m-component at v.
    std::uint32_t carried = base_i;  // leaving T_i toward W_{i,1}
    for (std::size_t pos = 0; pos < m.vertices.size(); ++pos) {
      NodeId v = m.vertices[pos];
      if (pos == 0) {
        if (ip.starts_into_t) add_comp(v, mref, 1, false);
        // otherwise the intersection node has no m-component
        continue;
      }
      if (v == y) continue;
      if (fork_no.count(v)) {
        std::uint64_t w = exp2_tower(base_i, fork_no[v]);
        require(w <= 64, ErrorCode::DomainExplosion,
                "fork width exceeds 64 bits; use a k override");
        add_comp(v, mref, static_cast<std::uint32_t>(w), true);
        carried = static_cast<std::uint32_t>(w);
      } else if (collider_no.count(v)) {
        add_comp(v, mref, 1, false);
        carried = 1;  // not actually carried further; colliders end runs
      } else {
        add_comp(v, mref, carried, false);
      }
    }
  }
  // Auxiliary paths: one bit per chain node; the source carries none.
  for (const auto& ip : mp.info) {
    for (std::size_t j = 0; j < ip.auxiliary.size(); ++j) {
      PathRef rref{PathRef::Kind::Aux, ip.index, j};
      const Path& r = ip.auxiliary[j];
      for (std::size_t pos = 1; pos < r.vertices.size(); ++pos) {
        NodeId v = r.vertices[pos];
        if (v == y) continue;
        add_comp(v, rref, 1, false);
      }
    }
  }

  // Deterministic component order and offsets.
  for (auto& [v, list] : s.comps) {
    std::sort(list.begin(), list.end(),
              [](const Component& a, const Component& b) { return a.path < b.path; });
    std::uint32_t off = 0, exo_off = 0;
    for (auto& c : list) {
      c.offset = off;
      off += c.width;
      if (c.exo_sourced) {
        c.exo_offset = exo_off;
        exo_off += c.width;
      }
    }
    require(off <= kMaxVarBits, ErrorCode::DomainExplosion,
            g.name(v) + " needs " + std::to_string(off) +
                " bits; use a k override");
    s.exo_bits[v] = exo_off;
  }

  // Per-component value expressions for chance nodes and for the compliant
  // policy at decisions.
  auto component_expr = [&](NodeId v, const Component& c) -> Expr {
    if (c.exo_sourced) return Expr::exo(c.exo_offset, c.width);
    switch (c.path.kind) {
      case PathRef::Kind::Control:
      case PathRef::Kind::Aux:
        return s.arriving(v, c.path);
      case PathRef::Kind::Info: {
        const auto& ip = mp.at(c.path.i);
        const Path& m = ip.truncated;
        std::size_t pos = pos_on(m, v);
        auto m_side = [&](std::size_t nbr_pos) -> Expr {
          NodeId nbr = m.vertices[nbr_pos];
          if (nbr == ip.intersection && !ip.starts_into_t)
            return s.bundle_outgoing(ip.index);
          PathRef mref{PathRef::Kind::Info, c.path.i, 0};
          return s.read_comp(nbr, mref);
        };
        if (pos == 0) {
          // T_i beginning T <- U: its bit indexes the first fork's value by
          // the arriving bundle.
          return Expr::idx(m_side(1), s.bundle_arriving(ip.index));
        }
        bool collider =
            std::find(ip.colliders.begin(), ip.colliders.end(), v) !=
                ip.colliders.end() &&
            v != ip.intersection;
        if (collider) {
          // Left side is nearer T_i, right side nearer Y.
          return Expr::idx(m_side(pos + 1), m_side(pos - 1));
        }
        // Chain node: copy whichever side feeds it.
        bool from_left = g.has_edge(m.vertices[pos - 1], v);
        return m_side(from_left ? pos - 1 : pos + 1);
      }
    }
    fail(ErrorCode::InternalAssertion, "unreachable component kind");
  };

  // Utility terms.
  std::vector<Expr> terms;
  for (const auto& ip : mp.info) {
    PathRef mref{PathRef::Kind::Info, ip.index, 0};
    // w_0: values arriving at Y along the bundle paths of T_i.
    std::vector<Expr> w0_parts;
    for (const auto& ref : s.sp.at(ip.index)) w0_parts.push_back(s.arriving(y, ref));
    Expr w0 = Expr::cat(std::move(w0_parts));
    require(w0.width == s.base.at(ip.index), ErrorCode::InternalAssertion,
            "bundle width mismatch at the utility");

    // Value arriving along the info path itself.
    const Path& m = ip.truncated;
    NodeId m_parent = m.vertices[m.vertices.size() - 2];
    Expr m_in = (m_parent == ip.intersection && !ip.starts_into_t)
                    ? s.bundle_outgoing(ip.index)
                    : s.read_comp(m_parent, mref);

    if (ip.directed()) {
      terms.push_back(Expr::eq(w0, m_in));
    } else {
      std::vector<Expr> w_parts{w0};
      for (std::size_t j = 0; j < ip.auxiliary.size(); ++j)
        w_parts.push_back(s.arriving(y, PathRef{PathRef::Kind::Aux, ip.index, j}));
      terms.push_back(Expr::compat(std::move(w_parts), m_in, s.base.at(ip.index)));
    }
  }

  // Assemble the SCM in topological order.
  MaterialityScm out;
  out.params = params;
  for (NodeId v : g.one_topological_order()) {
    Variable var;
    var.name = g.name(v);
    var.kind = g.kind(v);
    for (NodeId p : g.relatives(v, Relation::Parents)) var.parents.push_back(g.name(p));

    if (v == y) {
      std::size_t n_terms = terms.size();
      var.card = n_terms + 1;
      var.fn = Expr::add(terms);
      for (std::size_t u = 0; u <= n_terms; ++u)
        var.utility_values.push_back(Rational(static_cast<long>(u)));
      out.scm.variables.push_back(std::move(var));
      continue;
    }

    std::uint32_t bits = s.var_bits(v);
    var.bits = bits;
    var.card = Value(1) << bits;

    if (var.kind == NodeKind::Decision) {
      out.scm.variables.push_back(std::move(var));
      continue;
    }
    std::uint32_t exo = s.exo_bits.count(v) ? s.exo_bits[v] : 0;
    if (exo > 0) {
      Value worlds = Value(1) << exo;
      var.exo_probs.assign(worlds, Rational(1, static_cast<long>(worlds)));
      for (auto& p : var.exo_probs) p.canonicalize();
    }
    if (bits == 0) {
      var.fn = Expr::constant(0, 0);
    } else {
      std::vector<Expr> parts;
      for (const auto& c : s.comps.at(v)) parts.push_back(component_expr(v, c));
      var.fn = Expr::cat(std::move(parts));
    }
    out.scm.variables.push_back(std::move(var));
  }
  out.scm.validate();

  // Compliant policy: decisions mirror the chance semantics of their
  // components, reading only their own contexts.
  for (NodeId v : g.decisions()) {
    std::vector<Expr> parts;
    if (s.comps.count(v))
      for (const auto& c : s.comps.at(v)) parts.push_back(component_expr(v, c));
    Expr rule = parts.empty() ? Expr::constant(0, 0) : Expr::cat(std::move(parts));

    // Evaluate the rule over every context assignment; it only reads
    // contexts, which are exactly the decision's graph parents.
    const auto& ctx = g.contexts(v);
    std::size_t cells = 1;
    for (NodeId cnode : ctx) cells *= out.scm.var(g.name(cnode)).card;
    std::vector<Value> table(cells, 0);
    std::vector<Value> coord(ctx.size(), 0);
    for (std::size_t cell = 0; cell < cells; ++cell) {
      std::size_t rest = cell;
      for (std::size_t i2 = ctx.size(); i2-- > 0;) {
        coord[i2] = rest % out.scm.var(g.name(ctx[i2])).card;
        rest /= out.scm.var(g.name(ctx[i2])).card;
      }
      std::map<std::string, std::pair<Value, std::uint32_t>> inputs;
      for (std::size_t i2 = 0; i2 < ctx.size(); ++i2) {
        const Variable& cv = out.scm.var(g.name(ctx[i2]));
        inputs[cv.name] = {coord[i2], cv.bits ? *cv.bits : 0};
      }
      table[cell] = eval_expr_standalone(rule, inputs, 0, 0);
    }
    out.compliant.rules[g.name(v)] = table;
  }

  return out;
}

}  // namespace voigraph
