#include "musum/manifest.hpp"

#include "musum/common.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace musum {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

[[noreturn]] void fail_line(const std::filesystem::path& path, int line, const std::string& what) {
  fail(ErrorKind::Parse, strformat("%s:%d: %s", path.string().c_str(), line, what.c_str()));
}

} // namespace

int DatasetManifest::class_index(const std::string& label) const {
  const auto it = std::find(classes.begin(), classes.end(), label);
  return it == classes.end() ? -1 : static_cast<int>(it - classes.begin());
}

DatasetManifest load_manifest(const std::filesystem::path& path, bool check_files) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open manifest " + path.string());

  DatasetManifest m;
  m.base_dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");

  std::string line;
  int line_no = 0;
  bool saw_header = false;
  std::set<std::string> seen_paths;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    if (!saw_header) {
      const auto fields = split(line, '\t');
      if (fields.size() != 2 || fields[0] != kManifestMagic)
        fail_line(path, line_no, "expected header '" + std::string(kManifestMagic) + "\\t<version>'");
      int version = 0;
      if (std::sscanf(fields[1].c_str(), "%d", &version) != 1 || version != kManifestVersion)
        fail_line(path, line_no, "unsupported manifest version " + fields[1]);
      saw_header = true;
      continue;
    }

    if (line[0] == '#') {
      const auto fields = split(line.substr(1), '\t');
      if (fields.size() != 2) fail_line(path, line_no, "metadata needs '#key\\tvalue'");
      if (fields[0] == "classes") {
        m.classes = split(fields[1], ',');
      } else {
        m.meta[fields[0]] = fields[1];
      }
      continue;
    }

    const auto fields = split(line, '\t');
    if (fields.size() != 4)
      fail_line(path, line_no, strformat("expected 4 tab-separated fields, got %zu", fields.size()));
    ManifestRow row;
    row.path = fields[0];
    row.label = fields[1];
    if (row.path.empty()) fail_line(path, line_no, "empty path");
    if (std::sscanf(fields[2].c_str(), "%lf", &row.duration_seconds) != 1)
      fail_line(path, line_no, "bad duration '" + fields[2] + "'");
    if (std::sscanf(fields[3].c_str(), "%llu", reinterpret_cast<unsigned long long*>(&row.seed)) != 1)
      fail_line(path, line_no, "bad seed '" + fields[3] + "'");
    if (m.class_index(row.label) < 0)
      fail_line(path, line_no, "label '" + row.label + "' not in declared class set");
    if (!seen_paths.insert(row.path).second)
      fail_line(path, line_no, "duplicate path '" + row.path + "'");
    m.rows.push_back(std::move(row));
  }

  if (check_files) {
    for (const auto& row : m.rows) {
      const auto full = m.resolve(row);
      if (!std::filesystem::exists(full))
        fail(ErrorKind::Io, "manifest " + path.string() + " references missing file " + full.string());
    }
  }
  return m;
}

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
  std::FILE* f = std::fopen(path.string().c_str(), "w");
  if (f == nullptr) fail(ErrorKind::Io, "cannot write manifest " + path.string());
  std::fprintf(f, "%s\t%d\n", kManifestMagic, kManifestVersion);
  if (!manifest.classes.empty()) {
    std::string joined;
    for (size_t i = 0; i < manifest.classes.size(); ++i) {
      if (i > 0) joined += ',';
      joined += manifest.classes[i];
    }
    std::fprintf(f, "#classes\t%s\n", joined.c_str());
  }
  for (const auto& [key, value] : manifest.meta)
    std::fprintf(f, "#%s\t%s\n", key.c_str(), value.c_str());
  for (const auto& row : manifest.rows)
    std::fprintf(f, "%s\t%s\t%.6f\t%llu\n", row.path.c_str(), row.label.c_str(),
                 row.duration_seconds, static_cast<unsigned long long>(row.seed));
  std::fclose(f);
}

} // namespace musum
