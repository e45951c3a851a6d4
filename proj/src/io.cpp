#include "jlflux/io.hpp"

#include <cstdio>
#include <fstream>
#include <system_error>

#include "jlflux/error.hpp"

namespace jlflux {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail_numerical("io.write_failed", "cannot open " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out.flush()) fail_numerical("io.write_failed", "cannot write " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) fail_numerical("io.write_failed", "cannot rename onto " + path.string() + ": " + ec.message());
}

}  // namespace jlflux
