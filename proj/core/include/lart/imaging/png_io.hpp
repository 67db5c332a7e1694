#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "lart/imaging/raster.hpp"

namespace lart::imaging {

/// Encoder settings are fixed (zlib level 6, adaptive filtering, no
/// ancillary chunks) so identical rasters always encode to identical bytes.
std::vector<std::uint8_t> encode_png(const Raster<std::uint8_t>& img);
std::vector<std::uint8_t> encode_label_png(const LabelImage& labels);

void write_png(const std::filesystem::path& path, const Raster<std::uint8_t>& img);
/// 16-bit single-channel PNG; pixel value = region id.
void write_label_png(const std::filesystem::path& path, const LabelImage& labels);

/// Any 8/16-bit PNG, converted to 8-bit gray (luma for color input, alpha
/// composited over white).
GrayImage read_gray_png(const std::filesystem::path& path);
/// Any 8/16-bit PNG, converted to 8-bit RGB.
RgbImage read_rgb_png(const std::filesystem::path& path);
/// Single-channel 8- or 16-bit PNG read as raw label values.
LabelImage read_label_png(const std::filesystem::path& path);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace lart::imaging
