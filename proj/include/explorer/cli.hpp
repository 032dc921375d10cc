#pragma once

#include <filesystem>
#include <ostream>
#include <string>

#include "json.hpp"

namespace explorer {

enum ExitCode : int { kExitOk = 0, kExitRuntime = 1, kExitUsage = 2, kExitCompare = 3 };

/// `explorer serve|batch|oracle ...`. Returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Scene or bundle document from a file path, or from the fixture directory
/// by name ("crossing_disks") or by a path whose stem names a fixture.
nlohmann::json load_input(const std::string& arg, const char* fixture_kind);

/// Throws SchemaError when `doc` is not a batch summary.
void validate_summary(const nlohmann::json& doc);

}  // namespace explorer
