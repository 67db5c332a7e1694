#pragma once

#include <filesystem>
#include <optional>
#include <vector>

namespace lart::io {

/// One pair. Paths are stored relative to the manifest directory on disk
/// and resolved against it when loaded.
struct ManifestRecord {
  std::filesystem::path img_a;
  std::filesystem::path img_b;
  std::optional<std::filesystem::path> colored_a, colored_b;
  std::optional<std::filesystem::path> regions_a, regions_b;
  std::optional<std::filesystem::path> corr;

  bool has_labels() const { return regions_a && regions_b && corr; }
};

/// Parses a JSON Lines manifest and resolves its paths. Throws DataError
/// naming the line for malformed records or missing files.
std::vector<ManifestRecord> read_manifest(const std::filesystem::path& path);

/// Writes records whose paths are already relative to the manifest's directory.
void write_manifest(const std::filesystem::path& path, const std::vector<ManifestRecord>& records);

}  // namespace lart::io
