#include <cstdio>
#include <stdexcept>

#include "lart/imaging/png_io.hpp"
#include "lart/io/formats.hpp"
#include "lart/io/manifest.hpp"
#include "lart/rng.hpp"
#include "lart/synthgen/synthgen.hpp"

namespace lart::synthgen {

namespace fs = std::filesystem;

fs::path generate_benchmark(const fs::path& out_dir, int count, std::uint64_t seed, const SceneOptions& options) {
  if (count < 1) throw std::invalid_argument("generate_benchmark: count must be at least 1");
  std::vector<io::ManifestRecord> records;
  for (int i = 0; i < count; ++i) {
    char name[16];
    std::snprintf(name, sizeof(name), "%04d", i);
    const fs::path rel = fs::path("pairs") / name;
    const fs::path dir = out_dir / rel;
    const ScenePair pair = generate_pair(random_scene(mix_seed(seed, static_cast<std::uint64_t>(i)), options));
    imaging::write_png(dir / "lineart_a.png", pair.lineart_a);
    imaging::write_png(dir / "lineart_b.png", pair.lineart_b);
    imaging::write_png(dir / "colored_a.png", pair.colored_a);
    imaging::write_png(dir / "colored_b.png", pair.colored_b);
    io::write_region_map(dir / "regions_a.png", pair.regions_a);
    io::write_region_map(dir / "regions_b.png", pair.regions_b);
    io::write_corr(dir / "corr.json", pair.corr);
    io::write_json(dir / "pair.json", {{"regions_a", "regions_a.png"}, {"regions_b", "regions_b.png"}, {"corr", "corr.json"}});
    io::ManifestRecord r;
    r.img_a = rel / "lineart_a.png";
    r.img_b = rel / "lineart_b.png";
    r.colored_a = rel / "colored_a.png";
    r.colored_b = rel / "colored_b.png";
    r.regions_a = rel / "regions_a.png";
    r.regions_b = rel / "regions_b.png";
    r.corr = rel / "corr.json";
    records.push_back(std::move(r));
  }
  const fs::path manifest = out_dir / "manifest.jsonl";
  io::write_manifest(manifest, records);
  return manifest;
}

}  // namespace lart::synthgen
