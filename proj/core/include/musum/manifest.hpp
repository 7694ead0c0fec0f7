#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace musum {

struct ManifestRow {
  std::string path; // relative to the manifest's directory
  std::string label;
  double duration_seconds = 0.0;
  std::uint64_t seed = 0;
};

/// Tab-separated song list with a declared class set. Lines starting with
/// '#' carry key/value metadata (condition, algorithm, duration, classes).
struct DatasetManifest {
  std::vector<std::string> classes;
  std::vector<ManifestRow> rows;
  std::map<std::string, std::string> meta;
  std::filesystem::path base_dir; // where the manifest lives; not serialized

  std::filesystem::path resolve(const ManifestRow& row) const { return base_dir / row.path; }
  int class_index(const std::string& label) const;
};

inline constexpr const char* kManifestMagic = "musum-manifest";
inline constexpr int kManifestVersion = 1;

/// Parses and validates a manifest. Labels must come from the declared class
/// set and paths must be unique; violations report the offending line.
/// check_files additionally requires every referenced file to exist.
DatasetManifest load_manifest(const std::filesystem::path& path, bool check_files = true);

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);

} // namespace musum
