#pragma once

#include <filesystem>
#include <iosfwd>

#include "lart/patchsim/model.hpp"

namespace lart::patchsim {

// Layout (little-endian): "LART1", u32 tensor count, then per tensor
// u32 name length, name bytes, u32 rank, u32 dims[rank], f32 values.

void save_checkpoint(std::ostream& out, const ParamSet<float>& params);
void save_checkpoint(const std::filesystem::path& path, const ParamSet<float>& params);

/// Parses every record. Throws DataError on bad magic or truncation; nothing
/// is returned unless the whole stream parsed.
ParamSet<float> read_checkpoint(std::istream& in);

/// Parses and binds to `cfg`; throws ShapeMismatch naming the offending
/// tensor when the checkpoint was written for a different configuration.
PatchSimModel<float> load_checkpoint(std::istream& in, const ModelConfig& cfg);
PatchSimModel<float> load_checkpoint(const std::filesystem::path& path, const ModelConfig& cfg);

}  // namespace lart::patchsim
