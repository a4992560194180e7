#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "voigraph/policy.hpp"

namespace voigraph {

struct CommandOptions {
  std::uint64_t seed = 0;
  int threads = 1;
  BigInt policy_budget = BigInt(1) << 24;
  std::optional<std::uint32_t> k_override;
  /// Context removals applied before solving, as (decision, context) pairs.
  std::vector<std::pair<std::string, std::string>> scope_edits;
};

struct CommandResult {
  nlohmann::json report;    // deterministic for fixed inputs and seed
  std::string human;        // stdout text (may include timing)
  int exit_code = 0;
  std::string scm_out;      // synthesize only: the SCM document
};

CommandResult cmd_check(const std::string& graph_text, const CommandOptions& opt);
CommandResult cmd_synthesize(const std::string& graph_text,
                             const std::string& decision, const std::string& context,
                             const CommandOptions& opt);
CommandResult cmd_meu(const std::string& scm_text, const CommandOptions& opt);
CommandResult cmd_voi(const std::string& scm_text, const std::string& decision,
                      const std::string& context, const CommandOptions& opt);
CommandResult cmd_reproduce(const std::string& fixture, const CommandOptions& opt);

std::uint64_t fnv1a64(const std::string& text);
nlohmann::json policy_to_json(const Policy& p);

}  // namespace voigraph
