#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "json.hpp"

namespace rollcall::util {

// Write-to-temp then rename, so readers never observe a partial file.
void atomic_write(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);
nlohmann::json load_json(const std::filesystem::path& path);

// FNV-1a over raw bytes; used for input fingerprints in run manifests and
// for pinning the stopword list in tests.
std::uint64_t fnv1a64(const std::string& bytes);
std::uint64_t fnv1a64_file(const std::filesystem::path& path);
std::string hex64(std::uint64_t value);

}  // namespace rollcall::util
