#pragma once

#include <optional>

#include "voigraph/criteria.hpp"
#include "voigraph/scm.hpp"

namespace voigraph {

/// The control path, info paths, truncated info paths, intersection nodes,
/// forks, colliders and auxiliary paths backing the synthesis.
struct MaterialityPaths {
  NodeId x0 = 0;
  NodeId z0 = 0;
  Path control;  // d : A -> ... -> Z0 -> X0 -> ... -> Y
  int i_min = 0;
  int i_max = 0;

  struct InfoPath {
    int index = 0;         // i
    NodeId decision = 0;   // X_i on d
    NodeId context = 0;    // Z_i, parent of X_i along d
    Path full;             // m'_i
    NodeId intersection = 0;  // T_i
    Path truncated;        // m_i : T_i --- Y
    bool starts_into_t = false;  // m_i begins T_i <- U_{i,1}
    std::vector<NodeId> forks;      // U_{i,1..J_i}
    std::vector<NodeId> colliders;  // W_{i,1..J_i}; [0] == T_i when starts_into_t
    std::vector<Path> auxiliary;    // r_{i,j} : W_{i,j} -> ... -> Y
    bool directed() const { return forks.empty(); }
  };
  std::vector<InfoPath> info;  // ordered i = i_min .. i_max

  const InfoPath& at(int i) const { return info.at(static_cast<std::size_t>(i - i_min)); }
};

struct SynthesisParams {
  std::uint32_t k = 1;
  std::size_t b = 1;  // max context-set size over decisions
  std::size_t c = 1;  // max number of materiality paths through any vertex
  bool k_overridden = false;  // theoretical size guarantees void when true
};

/// The lexicographically smallest non-decision in C_Z outside the theorem's
/// condition-(C) conditioning closure. Exists whenever condition (C) holds.
NodeId chance_parent(const ScopedGraph& g, NodeId z);

/// Info path m'_Z : Z --- Y, active given the condition-(C) closure for Z;
/// begins Z <- N with N = chance_parent(Z) when Z is a decision.
Path info_path(const ScopedGraph& g, NodeId z);

MaterialityPaths build_materiality_paths(const ScopedGraph& g, NodeId x0, NodeId z0);

/// Machine-checks every structural invariant; throws on violation.
void validate_materiality_paths(const ScopedGraph& g, const MaterialityPaths& mp);

SynthesisParams compute_params(const ScopedGraph& g, const MaterialityPaths& mp,
                               std::optional<std::uint32_t> k_override = {});

struct MaterialityScm {
  FiniteSCM scm;
  Policy compliant;  // canonical copying policy; achieves i_max - i_min + 1
  SynthesisParams params;
};

/// Synthesizes the materiality SCM for the paths: bitstring domains composed
/// per path component, chain copies, fork sources, collider indexing, and
/// per-info-path utility terms summed into Y.
MaterialityScm build_materiality_scm(const ScopedGraph& g, const MaterialityPaths& mp,
                                     const SynthesisParams& params);

}  // namespace voigraph
