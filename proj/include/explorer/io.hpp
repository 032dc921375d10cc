#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace explorer {

/// Throws Error(Io) when the file cannot be read.
std::string read_file(const std::filesystem::path& path);
/// Writes through a temporary sibling and renames, so readers never see a
/// partial file. Creates parent directories.
void write_file(const std::filesystem::path& path, std::string_view content);

/// Bundled fixture file, e.g. "scenes/crossing_disks.json". The directory
/// can be moved with the EXPLORER_FIXTURE_DIR environment variable.
std::filesystem::path fixture_path(std::string_view relative);

}  // namespace explorer
