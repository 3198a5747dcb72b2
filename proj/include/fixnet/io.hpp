#pragma once

#include <filesystem>
#include <string>

namespace fixnet {

/// Writes to a temporary sibling, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& content);

std::string read_file(const std::filesystem::path& path);

}  // namespace fixnet
