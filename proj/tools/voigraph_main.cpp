#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "voigraph/fixtures.hpp"
#include "voigraph/report.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "cannot open " << path << "\n";
    std::exit(2);
  }
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "cannot write " << path << "\n";
    std::exit(2);
  }
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"materiality analysis of scoped causal decision graphs"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  int threads = 1;
  std::string budget = "16777216";
  std::string json_out;
  app.add_option("--seed", seed, "seed for randomized components");
  app.add_option("--threads", threads, "worker threads for policy search");
  app.add_option("--budget", budget, "policy enumeration budget");
  app.add_option("--json-out", json_out, "write the report as JSON to PATH");

  std::string graph_file, scm_file, decision, context, fixture, scm_out;
  long long k_override = -1;
  std::vector<std::string> drops;

  auto* check = app.add_subcommand("check", "run the graphical criteria");
  check->add_option("graph", graph_file, "scoped-graph JSON file")->required();

  auto* synth = app.add_subcommand("synthesize", "build a materiality SCM");
  synth->add_option("graph", graph_file)->required();
  synth->add_option("--decision", decision)->required();
  synth->add_option("--context", context)->required();
  synth->add_option("--k-override", k_override,
                    "override the construction's bit width");
  synth->add_option("--out", scm_out, "write the SCM JSON to PATH");

  auto* meu_cmd = app.add_subcommand("meu", "exact maximum expected utility");
  meu_cmd->add_option("scm", scm_file, "SCM JSON file")->required();
  meu_cmd->add_option("--drop-context", drops,
                      "scope edit decision:context, repeatable");

  auto* voi_cmd = app.add_subcommand("voi", "exact value of information");
  voi_cmd->add_option("scm", scm_file)->required();
  voi_cmd->add_option("--decision", decision)->required();
  voi_cmd->add_option("--context", context)->required();

  auto* repro = app.add_subcommand("reproduce", "run a named paper fixture");
  repro->add_option("fixture", fixture, "fixture name, or 'list'")->required();

  CLI11_PARSE(app, argc, argv);

  voigraph::CommandOptions opt;
  opt.seed = seed;
  opt.threads = threads;
  opt.policy_budget = voigraph::BigInt(budget);
  if (k_override >= 0)
    opt.k_override = static_cast<std::uint32_t>(k_override);
  for (const auto& d : drops) {
    auto pos = d.find(':');
    if (pos == std::string::npos) {
      std::cerr << "--drop-context expects decision:context\n";
      return 2;
    }
    opt.scope_edits.emplace_back(d.substr(0, pos), d.substr(pos + 1));
  }

  try {
    auto t0 = std::chrono::steady_clock::now();
    voigraph::CommandResult res;
    if (check->parsed()) {
      res = voigraph::cmd_check(read_file(graph_file), opt);
    } else if (synth->parsed()) {
      res = voigraph::cmd_synthesize(read_file(graph_file), decision, context, opt);
      if (!scm_out.empty()) write_file(scm_out, res.scm_out);
    } else if (meu_cmd->parsed()) {
      res = voigraph::cmd_meu(read_file(scm_file), opt);
    } else if (voi_cmd->parsed()) {
      res = voigraph::cmd_voi(read_file(scm_file), decision, context, opt);
    } else if (repro->parsed()) {
      if (fixture == "list") {
        for (const auto& name : voigraph::fixture_names())
          std::cout << name << "\n";
        return 0;
      }
      res = voigraph::cmd_reproduce(fixture, opt);
    }
    auto t1 = std::chrono::steady_clock::now();
    std::cout << res.human;
    std::cerr << "elapsed "
              << std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0)
                     .count()
              << " ms\n";
    if (!json_out.empty()) write_file(json_out, res.report.dump(2) + "\n");
    return res.exit_code;
  } catch (const voigraph::VgError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
