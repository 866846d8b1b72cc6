// metra: run workspace files.
//
//   metra run <file> [--json|--text] [--limits k=v,...]
//   metra export <file> [--json|--dsl]
//
// Exit codes: 0 the commands ran (verdicts are data), 1 usage, parse or load
// error, 2 a resource cap was hit.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "metra/commands.hpp"
#include "metra/error.hpp"
#include "metra/json_io.hpp"
#include "metra/workspace.hpp"

namespace {

metra::Workspace load(const std::string& file) {
  if (std::filesystem::path(file).extension() == ".json") {
    std::ifstream in(file);
    if (!in) throw metra::DomainError("cannot read '" + file + "'");
    metra::Json j;
    try {
      j = metra::Json::parse(in);
    } catch (const metra::Json::exception& e) {
      throw metra::DomainError(std::string("invalid JSON: ") + e.what());
    }
    return metra::workspace_from_json(j);
  }
  return metra::load_workspace(file);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Metric universal algebra workbench"};
  app.require_subcommand(1);

  std::string file, limits;
  bool json = false, text = false, dsl = false;

  auto* run = app.add_subcommand("run", "Run the commands of a workspace");
  run->add_option("file", file, "Workspace file (.json for a JSON workspace)")->required();
  auto* json_flag = run->add_flag("--json", json, "JSON report");
  run->add_flag("--text", text, "Text report (default)")->excludes(json_flag);
  run->add_option("--limits", limits, "Override limits, e.g. valuations=1000,sections=50");

  auto* exp = app.add_subcommand("export", "Print a workspace in canonical form");
  exp->add_option("file", file, "Workspace file")->required();
  auto* exp_json = exp->add_flag("--json", json, "JSON document (default)");
  exp->add_flag("--dsl", dsl, "DSL text")->excludes(exp_json);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  metra::Workspace ws;
  try {
    ws = load(file);
    if (!limits.empty()) metra::apply_limit_overrides(ws.limits, limits);
  } catch (const metra::Error& e) {
    std::cerr << "metra: " << file << ": " << e.what() << "\n";
    return 1;
  }

  if (exp->parsed()) {
    if (dsl)
      std::cout << metra::serialize_workspace(ws);
    else
      std::cout << metra::workspace_to_json(ws).dump(2) << "\n";
    return 0;
  }

  auto results = metra::run_all(ws);
  if (json)
    std::cout << metra::report_json(ws, results).dump(2) << "\n";
  else
    std::cout << metra::report_text(ws, results);
  for (const auto& r : results)
    if (r.resource) return 2;
  return 0;
}
