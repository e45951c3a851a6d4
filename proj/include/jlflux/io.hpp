#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace jlflux {

// Shortest-safe round-trip text for a double: 17 significant digits.
std::string format_double(double x);

// Writes content to a sibling temporary file and renames it over path.
// Throws Error(Numerical, "io.write_failed") on failure.
void write_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace jlflux
