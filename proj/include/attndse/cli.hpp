// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace adse {

// Exit codes of the attn_dse tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitCompatibility = 3;
inline constexpr int kExitNumerical = 4;

// Runs one attn_dse invocation (args[0] is the program name). Diagnostics go
// to `err`, progress to `out`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Run manifest of one subcommand invocation. `id` hashes the command,
// resolved settings and input contents, so reruns of the same experiment
// share it; timestamps and tool version are recorded but not hashed.
struct RunManifest {
  std::string command;
  nlohmann::json settings = nlohmann::json::object();
  nlohmann::json inputs = nlohmann::json::object();  // role -> {path, sha256}
  std::string id;
  nlohmann::json extra = nlohmann::json::object();   // results, wall time

  void seal();  // computes id
  nlohmann::json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);
};

RunManifest read_manifest(const std::filesystem::path& dir);
void write_manifest(const std::filesystem::path& dir, const RunManifest& m);

}  // namespace adse
