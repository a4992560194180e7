#pragma once

#include <optional>
#include <string>
#include <vector>

#include "voigraph/scm.hpp"

namespace voigraph {

/// Named figure-scale decision problems used as regression fixtures. Every
/// fixture has a graph; some carry a hand-written SCM and a target
/// (decision, context) edge for materiality queries.
std::vector<std::string> fixture_names();
bool has_fixture(const std::string& name);
ScopedGraph fixture_graph(const std::string& name);
std::optional<FiniteSCM> fixture_scm(const std::string& name);
std::optional<std::pair<std::string, std::string>> fixture_target(
    const std::string& name);

/// Fixture graphs satisfying theorem conditions A-C, paired with the target
/// edge used in synthesis checks.
std::vector<std::pair<std::string, std::pair<std::string, std::string>>>
thm1_fixtures();

}  // namespace voigraph
