#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string_view>

namespace ecokg {

/// Writes through a sibling temp file and renames it over `path`. Throws InputError on failure.
void write_atomic(const std::filesystem::path& path, std::string_view content);
void write_atomic(const std::filesystem::path& path, const std::function<void(std::ostream&)>& fill,
                  bool binary = false);

}  // namespace ecokg
