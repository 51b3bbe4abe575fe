#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace ilb {

inline constexpr std::string_view kToolVersion = "0.3.0";

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);  // IoError when unreadable

struct ManifestEntry {
  std::string path;  // relative to the run directory
  std::string sha256;
  std::uintmax_t bytes = 0;
};

struct RunManifest {
  std::string command;
  std::string config_hash;
  std::string tool_version{kToolVersion};
  std::string started_at;   // UTC, ISO 8601
  std::string finished_at;
  std::vector<ManifestEntry> files;
};

std::string utc_timestamp();

// Hashes `files` (relative to `dir`) and writes dir/manifest.json.
void write_manifest(const std::filesystem::path& dir, RunManifest manifest, const std::vector<std::string>& files);
RunManifest read_manifest(const std::filesystem::path& dir);

}  // namespace ilb
