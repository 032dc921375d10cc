#include "explorer/io.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "explorer/error.hpp"

namespace explorer {

namespace fs = std::filesystem;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string(), path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string(), path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string(), path.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot replace " + path.string() + ": " + ec.message(), path.string());
}

fs::path fixture_path(std::string_view relative) {
  if (const char* dir = std::getenv("EXPLORER_FIXTURE_DIR"); dir != nullptr && *dir != '\0') {
    return fs::path(dir) / relative;
  }
  return fs::path(EXPLORER_FIXTURE_DIR) / relative;
}

}  // namespace explorer
