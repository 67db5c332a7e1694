#include "lart/io/formats.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "lart/error.hpp"
#include "lart/imaging/png_io.hpp"

namespace lart::io {

namespace {

constexpr char kSimMagic[5] = {'L', 'S', 'I', 'M', '1'};

template <class T>
T get_field(const json& obj, const char* key, const char* what) {
  if (!obj.is_object() || !obj.contains(key)) throw DataError(std::string(what) + ": missing \"" + key + "\"");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw DataError(std::string(what) + ": field \"" + key + "\" has the wrong type");
  }
}

Label get_label(const json& v, const char* what) {
  if (!v.is_number_integer()) throw DataError(std::string(what) + ": region ids must be integers");
  const auto id = v.get<std::int64_t>();
  if (id < 1 || id > 65535) throw DataError(std::string(what) + ": region id " + std::to_string(id) + " out of range");
  return static_cast<Label>(id);
}

std::vector<Label> get_labels(const json& obj, const char* key, const char* what) {
  std::vector<Label> out;
  if (!obj.contains(key)) return out;
  if (!obj.at(key).is_array()) throw DataError(std::string(what) + ": \"" + key + "\" must be an array");
  for (const auto& v : obj.at(key)) out.push_back(get_label(v, what));
  return out;
}

void put_u32(std::ostream& out, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                              static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw DataError("similarity matrix: truncated stream");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

json corr_to_json(const CorrSet& corr) {
  json pairs = json::array();
  for (const auto& p : corr.pairs()) {
    pairs.push_back({{"a", p.a}, {"b", p.b}, {"score", p.score}, {"dir", std::string(to_string(p.dir))}});
  }
  return {{"pairs", pairs}, {"unmatched_a", corr.unmatched_a()}, {"unmatched_b", corr.unmatched_b()}};
}

CorrSet corr_from_json(const json& doc) {
  constexpr const char* what = "correspondence document";
  if (!doc.is_object() || !doc.contains("pairs") || !doc.at("pairs").is_array()) {
    throw DataError(std::string(what) + ": expected an object with a \"pairs\" array");
  }
  CorrSet out;
  for (const auto& p : doc.at("pairs")) {
    if (!p.is_object() || !p.contains("a") || !p.contains("b")) throw DataError(std::string(what) + ": pair needs \"a\" and \"b\"");
    CorrPair pair;
    pair.a = get_label(p.at("a"), what);
    pair.b = get_label(p.at("b"), what);
    pair.score = p.contains("score") ? get_field<double>(p, "score", what) : 1.0;
    if (p.contains("dir")) {
      try {
        pair.dir = direction_from_string(get_field<std::string>(p, "dir", what));
      } catch (const std::invalid_argument& e) {
        throw DataError(std::string(what) + ": " + e.what());
      }
    }
    if (out.contains(pair.a, pair.b)) {
      throw DataError(std::string(what) + ": duplicate pair (" + std::to_string(pair.a) + ", " + std::to_string(pair.b) + ")");
    }
    out.add(pair);
  }
  out.set_unmatched(get_labels(doc, "unmatched_a", what), get_labels(doc, "unmatched_b", what));
  return out;
}

void write_json(const std::filesystem::path& path, const json& doc) {
  const std::string text = doc.dump(2) + "\n";
  imaging::write_file_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError(path.string() + ": invalid JSON (" + e.what() + ")");
  }
}

void write_corr(const std::filesystem::path& path, const CorrSet& corr) { write_json(path, corr_to_json(corr)); }

CorrSet read_corr(const std::filesystem::path& path) {
  try {
    return corr_from_json(read_json(path));
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::filesystem::path region_sidecar(const std::filesystem::path& png) {
  auto p = png;
  p.replace_extension(".json");
  return p;
}

json region_map_to_json(const RegionMap& regions) {
  json list = json::array();
  for (const auto& r : regions.regions()) {
    list.push_back({{"id", r.id}, {"pixel_count", r.pixel_count}, {"member_patches", r.member_patches}});
  }
  return {{"width", regions.width()}, {"height", regions.height()}, {"regions", list}};
}

void write_region_map(const std::filesystem::path& png, const RegionMap& regions) {
  imaging::write_label_png(png, regions.labels());
  write_json(region_sidecar(png), region_map_to_json(regions));
}

RegionMap read_region_map(const std::filesystem::path& png) {
  RegionMap map(imaging::read_label_png(png));
  const auto sidecar = region_sidecar(png);
  if (!std::filesystem::exists(sidecar)) return map;
  const json doc = read_json(sidecar);
  const std::string what = sidecar.string();
  if (!doc.is_object() || !doc.contains("regions") || !doc.at("regions").is_array()) {
    throw DataError(what + ": expected a \"regions\" array");
  }
  const auto& list = doc.at("regions");
  if (list.size() != map.regions().size()) {
    throw DataError(what + ": lists " + std::to_string(list.size()) + " regions but the label image has " +
                    std::to_string(map.regions().size()));
  }
  std::map<Label, std::vector<int>> members;
  for (const auto& r : list) {
    const Label id = get_label(r.contains("id") ? r.at("id") : json(), what.c_str());
    const auto* info = map.find(id);
    if (!info) throw DataError(what + ": region " + std::to_string(id) + " does not occur in the label image");
    const auto count = get_field<std::size_t>(r, "pixel_count", what.c_str());
    if (count != info->pixel_count) {
      throw DataError(what + ": region " + std::to_string(id) + " pixel_count " + std::to_string(count) +
                      " disagrees with the label image (" + std::to_string(info->pixel_count) + ")");
    }
    if (r.contains("member_patches")) members[id] = r.at("member_patches").get<std::vector<int>>();
  }
  std::vector<bool> seen;
  for (auto& [id, patches] : members) {
    for (int p : patches) {
      if (p < 0) throw DataError(what + ": negative patch index");
      if (static_cast<std::size_t>(p) >= seen.size()) seen.resize(p + 1, false);
      if (seen[p]) throw DataError(what + ": patch " + std::to_string(p) + " belongs to two regions");
      seen[p] = true;
    }
    map.set_member_patches(id, std::move(patches));
  }
  return map;
}

void write_sim_matrix(std::ostream& out, const patchsim::SimMatrix& s) {
  out.write(kSimMagic, sizeof(kSimMagic));
  put_u32(out, static_cast<std::uint32_t>(s.n()));
  const auto& e = s.entries();
  for (Eigen::Index i = 0; i < e.rows(); ++i) {
    for (Eigen::Index j = 0; j < e.cols(); ++j) put_u32(out, std::bit_cast<std::uint32_t>(e(i, j)));
  }
  if (!out) throw DataError("failed to write similarity matrix");
}

void write_sim_matrix(const std::filesystem::path& path, const patchsim::SimMatrix& s) {
  std::ostringstream buf;
  write_sim_matrix(buf, s);
  const std::string bytes = buf.str();
  imaging::write_file_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()));
}

patchsim::SimMatrix read_sim_matrix(std::istream& in) {
  char magic[sizeof(kSimMagic)];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kSimMagic, sizeof(magic)) != 0) {
    throw DataError("similarity matrix: bad magic");
  }
  const std::uint32_t n = get_u32(in);
  if (n == 0 || n > 16384) throw DataError("similarity matrix: implausible patch count " + std::to_string(n));
  patchsim::Matrixf e(2 * n, 2 * n);
  for (Eigen::Index i = 0; i < e.rows(); ++i) {
    for (Eigen::Index j = 0; j < e.cols(); ++j) e(i, j) = std::bit_cast<float>(get_u32(in));
  }
  return patchsim::SimMatrix(static_cast<int>(n), std::move(e));
}

patchsim::SimMatrix read_sim_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return read_sim_matrix(in);
}

json config_to_json(const PipelineConfig& cfg) {
  const auto& m = cfg.model;
  const auto& g = cfg.merge;
  const auto& a = cfg.autolabel;
  return {
      {"model",
       {{"patch_size", m.patch_size},
        {"image_side", m.image_side},
        {"dim", m.dim},
        {"vit_depth", m.vit_depth},
        {"mt_depth", m.mt_depth},
        {"heads", m.heads},
        {"mlp_ratio", m.mlp_ratio},
        {"temperature", m.temperature},
        {"negatives", m.negatives},
        {"positives_per_batch", m.positives_per_batch}}},
      {"merge",
       {{"sim_threshold", g.sim_threshold},
        {"edge_block_threshold", g.edge_block_threshold},
        {"min_region_px", g.min_region_px},
        {"contact_merge_ratio", g.contact_merge_ratio},
        {"seed_margin", g.seed_margin},
        {"seed_background", g.seed_background},
        {"background_clearance", g.background_clearance}}},
      {"theta", cfg.theta},
      {"edge_sigma", cfg.edge_sigma},
      {"autolabel",
       {{"k_colors", a.k_colors},
        {"min_fragment_px", a.min_fragment_px},
        {"color_filter_tol", a.color_filter_tol},
        {"background_tol", a.background_tol},
        {"coarse_pos_weight", a.coarse_pos_weight},
        {"coarse_color_weight", a.coarse_color_weight},
        {"coarse_threshold", a.coarse_threshold}}},
  };
}

namespace {

template <class T>
void apply(const json& obj, const std::string& section, const char* key, T& target, std::size_t& used) {
  if (!obj.contains(key)) return;
  try {
    target = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw DataError("config: \"" + section + "." + key + "\" has the wrong type");
  }
  ++used;
}

}  // namespace

PipelineConfig config_from_json(const json& doc, PipelineConfig base) {
  if (!doc.is_object()) throw DataError("config: expected a JSON object");
  std::size_t used_top = 0;
  if (doc.contains("model")) {
    const auto& o = doc.at("model");
    auto& m = base.model;
    std::size_t used = 0;
    apply(o, "model", "patch_size", m.patch_size, used);
    apply(o, "model", "image_side", m.image_side, used);
    apply(o, "model", "dim", m.dim, used);
    apply(o, "model", "vit_depth", m.vit_depth, used);
    apply(o, "model", "mt_depth", m.mt_depth, used);
    apply(o, "model", "heads", m.heads, used);
    apply(o, "model", "mlp_ratio", m.mlp_ratio, used);
    apply(o, "model", "temperature", m.temperature, used);
    apply(o, "model", "negatives", m.negatives, used);
    apply(o, "model", "positives_per_batch", m.positives_per_batch, used);
    if (used != o.size()) throw DataError("config: unknown key in \"model\"");
    ++used_top;
  }
  if (doc.contains("merge")) {
    const auto& o = doc.at("merge");
    auto& g = base.merge;
    std::size_t used = 0;
    apply(o, "merge", "sim_threshold", g.sim_threshold, used);
    apply(o, "merge", "edge_block_threshold", g.edge_block_threshold, used);
    apply(o, "merge", "min_region_px", g.min_region_px, used);
    apply(o, "merge", "contact_merge_ratio", g.contact_merge_ratio, used);
    apply(o, "merge", "seed_margin", g.seed_margin, used);
    apply(o, "merge", "seed_background", g.seed_background, used);
    apply(o, "merge", "background_clearance", g.background_clearance, used);
    if (used != o.size()) throw DataError("config: unknown key in \"merge\"");
    ++used_top;
  }
  if (doc.contains("autolabel")) {
    const auto& o = doc.at("autolabel");
    auto& a = base.autolabel;
    std::size_t used = 0;
    apply(o, "autolabel", "k_colors", a.k_colors, used);
    apply(o, "autolabel", "min_fragment_px", a.min_fragment_px, used);
    apply(o, "autolabel", "color_filter_tol", a.color_filter_tol, used);
    apply(o, "autolabel", "background_tol", a.background_tol, used);
    apply(o, "autolabel", "coarse_pos_weight", a.coarse_pos_weight, used);
    apply(o, "autolabel", "coarse_color_weight", a.coarse_color_weight, used);
    apply(o, "autolabel", "coarse_threshold", a.coarse_threshold, used);
    if (used != o.size()) throw DataError("config: unknown key in \"autolabel\"");
    ++used_top;
  }
  apply(doc, "", "theta", base.theta, used_top);
  apply(doc, "", "edge_sigma", base.edge_sigma, used_top);
  if (used_top != doc.size()) throw DataError("config: unknown top-level key");
  try {
    base.model.validate();
    base.autolabel.validate();
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("config: ") + e.what());
  }
  if (base.edge_sigma <= 0.0) throw DataError("config: edge_sigma must be positive");
  return base;
}

}  // namespace lart::io
