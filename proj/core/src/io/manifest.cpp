#include "lart/io/manifest.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "lart/error.hpp"
#include "lart/imaging/png_io.hpp"

namespace lart::io {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<ManifestRecord> read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open manifest " + path.string());
  const fs::path dir = path.parent_path();
  std::vector<ManifestRecord> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error&) {
      throw DataError(where + ": not a JSON object");
    }
    if (!rec.is_object()) throw DataError(where + ": not a JSON object");
    auto resolve = [&](const char* key, bool required) -> std::optional<fs::path> {
      if (!rec.contains(key)) {
        if (required) throw DataError(where + ": missing \"" + key + "\"");
        return std::nullopt;
      }
      if (!rec.at(key).is_string()) throw DataError(where + ": \"" + key + "\" must be a path string");
      fs::path p = dir / rec.at(key).get<std::string>();
      if (!fs::exists(p)) throw DataError(where + ": file not found: " + p.string());
      return p;
    };
    ManifestRecord r;
    r.img_a = *resolve("img_a", true);
    r.img_b = *resolve("img_b", true);
    r.colored_a = resolve("colored_a", false);
    r.colored_b = resolve("colored_b", false);
    r.regions_a = resolve("regions_a", false);
    r.regions_b = resolve("regions_b", false);
    r.corr = resolve("corr", false);
    out.push_back(std::move(r));
  }
  return out;
}

void write_manifest(const fs::path& path, const std::vector<ManifestRecord>& records) {
  std::ostringstream text;
  for (const auto& r : records) {
    // Keys in a fixed order so manifests are byte-stable.
    json rec = json::object();
    rec["img_a"] = r.img_a.generic_string();
    rec["img_b"] = r.img_b.generic_string();
    if (r.colored_a) rec["colored_a"] = r.colored_a->generic_string();
    if (r.colored_b) rec["colored_b"] = r.colored_b->generic_string();
    if (r.regions_a) rec["regions_a"] = r.regions_a->generic_string();
    if (r.regions_b) rec["regions_b"] = r.regions_b->generic_string();
    if (r.corr) rec["corr"] = r.corr->generic_string();
    text << rec.dump() << '\n';
  }
  const std::string s = text.str();
  imaging::write_file_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
}

}  // namespace lart::io
