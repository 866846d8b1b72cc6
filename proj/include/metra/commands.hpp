#pragma once

#include <string>
#include <vector>

#include "metra/json_io.hpp"
#include "metra/workspace.hpp"

namespace metra {

struct CommandResult {
  /// Canonical text of the command.
  std::string command;
  /// "ok" (positive verdict), "fail" (negative verdict) or "error".
  std::string status;
  /// Verdict details, witnesses and constructed objects.
  Json result = Json::object();
  /// Set when status == "error".
  std::string error_kind;
  std::string error_message;
  std::vector<std::size_t> error_witness;
  /// The error was a resource cap.
  bool resource = false;

  Json to_json() const;
};

/// Runs one command under ws.limits. Library errors are caught and reported
/// in the result; verdicts are data.
CommandResult run_command(const Workspace& ws, const Command& c);

/// Every command of the workspace, in order.
std::vector<CommandResult> run_all(const Workspace& ws);

/// {"schema": 1, "limits": ..., "results": [...]}
Json report_json(const Workspace& ws, const std::vector<CommandResult>& results);
std::string report_text(const Workspace& ws, const std::vector<CommandResult>& results);

}  // namespace metra
