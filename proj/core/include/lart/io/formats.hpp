#pragma once

#include <filesystem>
#include <iosfwd>

#include "json.hpp"

#include "lart/autolabel/autolabel.hpp"
#include "lart/patchsim/config.hpp"
#include "lart/patchsim/similarity.hpp"
#include "lart/regionize/regionize.hpp"
#include "lart/regionmatch/corr_set.hpp"

namespace lart::io {

using nlohmann::json;

/// {"pairs":[{"a","b","score","dir"}],"unmatched_a":[...],"unmatched_b":[...]}
json corr_to_json(const CorrSet& corr);
/// Throws DataError on a malformed document.
CorrSet corr_from_json(const json& doc);
void write_corr(const std::filesystem::path& path, const CorrSet& corr);
CorrSet read_corr(const std::filesystem::path& path);

/// Sidecar of a region-map PNG: same stem, ".json" extension.
std::filesystem::path region_sidecar(const std::filesystem::path& png);
json region_map_to_json(const RegionMap& regions);
/// Writes the 16-bit label PNG and its sidecar.
void write_region_map(const std::filesystem::path& png, const RegionMap& regions);
/// Reads the PNG; when the sidecar exists its region list must agree with
/// the raster and its patch membership is restored.
RegionMap read_region_map(const std::filesystem::path& png);

/// "LSIM1", u32 n, then (2n)^2 little-endian f32 in row-major order.
void write_sim_matrix(std::ostream& out, const patchsim::SimMatrix& s);
void write_sim_matrix(const std::filesystem::path& path, const patchsim::SimMatrix& s);
patchsim::SimMatrix read_sim_matrix(std::istream& in);
patchsim::SimMatrix read_sim_matrix(const std::filesystem::path& path);

/// Pretty-printed with a trailing newline; output is byte-stable.
void write_json(const std::filesystem::path& path, const json& doc);
/// Throws DataError on unreadable or malformed input.
json read_json(const std::filesystem::path& path);

/// All tunables in one document: {"model":{...},"merge":{...},"theta":x,
/// "edge_sigma":x,"autolabel":{...}}. Missing keys keep their defaults.
struct PipelineConfig {
  patchsim::ModelConfig model;
  regionize::MergeParams merge;
  double theta = -1.0;  ///< negative: 1.5 / N
  double edge_sigma = 1.0;
  autolabel::AutoLabelParams autolabel;
};

json config_to_json(const PipelineConfig& cfg);
/// Applies the keys present in `doc` over `base`; unknown keys are errors.
PipelineConfig config_from_json(const json& doc, PipelineConfig base = {});

}  // namespace lart::io
