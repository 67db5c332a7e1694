#include "lart/imaging/png_io.hpp"

#include <png.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "lart/error.hpp"

namespace lart::imaging {
namespace {

struct WriteState {
  std::vector<std::uint8_t>* out;
};

void write_cb(png_structp png, png_bytep data, png_size_t len) {
  auto* st = static_cast<WriteState*>(png_get_io_ptr(png));
  st->out->insert(st->out->end(), data, data + len);
}
void flush_cb(png_structp) {}

struct ReadState {
  std::span<const std::uint8_t> bytes;
  std::size_t pos = 0;
};

void read_cb(png_structp png, png_bytep data, png_size_t len) {
  auto* st = static_cast<ReadState*>(png_get_io_ptr(png));
  if (st->pos + len > st->bytes.size()) png_error(png, "truncated PNG stream");
  std::memcpy(data, st->bytes.data() + st->pos, len);
  st->pos += len;
}

[[noreturn]] void error_cb(png_structp png, png_const_charp msg) {
  auto* text = static_cast<std::string*>(png_get_error_ptr(png));
  if (text) *text = msg;
  png_longjmp(png, 1);
}
void warning_cb(png_structp, png_const_charp) {}

std::vector<std::uint8_t> encode(int width, int height, int color_type, int bit_depth,
                                 const std::vector<png_bytep>& rows) {
  std::vector<std::uint8_t> out;
  std::string err;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err, error_cb, warning_cb);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) throw std::runtime_error("png: allocation failed");
  WriteState st{&out};
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw DataError("png encode failed: " + err);
  }
  png_set_write_fn(png, &st, write_cb, flush_cb);
  png_set_compression_level(png, 6);
  png_set_IHDR(png, info, width, height, bit_depth, color_type, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, const_cast<png_bytepp>(rows.data()));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

struct Decoded {
  int width = 0, height = 0, channels = 0, bit_depth = 0;
  bool gray = false;
  std::vector<std::uint8_t> data;  // row-major, big-endian samples for 16-bit
};

/// Decodes to gray, gray+alpha, RGB or RGBA with palette/low-bit expansion.
Decoded decode(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) throw DataError("not a PNG stream");
  std::string err;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err, error_cb, warning_cb);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) throw std::runtime_error("png: allocation failed");
  ReadState st{bytes, 0};
  Decoded d;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw DataError("png decode failed: " + err);
  }
  png_set_read_fn(png, &st, read_cb);
  png_read_info(png, info);
  const int color_type = png_get_color_type(png, info);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_set_interlace_handling(png);
  png_read_update_info(png, info);
  d.width = static_cast<int>(png_get_image_width(png, info));
  d.height = static_cast<int>(png_get_image_height(png, info));
  d.channels = png_get_channels(png, info);
  d.bit_depth = png_get_bit_depth(png, info);
  const int ct = png_get_color_type(png, info);
  d.gray = (ct & PNG_COLOR_MASK_COLOR) == 0;
  const std::size_t rowbytes = png_get_rowbytes(png, info);
  d.data.resize(rowbytes * d.height);
  std::vector<png_bytep> rows(d.height);
  for (int y = 0; y < d.height; ++y) rows[y] = d.data.data() + y * rowbytes;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return d;
}

double sample(const Decoded& d, std::size_t i) {
  if (d.bit_depth == 16) return ((d.data[2 * i] << 8) | d.data[2 * i + 1]) / 257.0;
  return d.data[i];
}

/// Converts a decoded image to 8-bit RGB, compositing alpha over white.
RgbImage to_rgb(const Decoded& d) {
  RgbImage out(d.width, d.height, 3);
  const bool alpha = d.channels == 2 || d.channels == 4;
  for (int y = 0; y < d.height; ++y) {
    for (int x = 0; x < d.width; ++x) {
      const std::size_t base = (static_cast<std::size_t>(y) * d.width + x) * d.channels;
      double rgb[3];
      for (int c = 0; c < 3; ++c) rgb[c] = sample(d, base + (d.gray ? 0 : c));
      const double a = alpha ? sample(d, base + d.channels - 1) / 255.0 : 1.0;
      for (int c = 0; c < 3; ++c) {
        const double v = rgb[c] * a + 255.0 * (1.0 - a);
        out.at(x, y, c) = static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
      }
    }
  }
  return out;
}

}  // namespace

std::vector<std::uint8_t> encode_png(const Raster<std::uint8_t>& img) {
  if (img.channels() != 1 && img.channels() != 3) throw std::invalid_argument("encode_png: need 1 or 3 channels");
  if (img.empty()) throw std::invalid_argument("encode_png: empty raster");
  std::vector<png_bytep> rows(img.height());
  auto* base = const_cast<std::uint8_t*>(img.data().data());
  for (int y = 0; y < img.height(); ++y) rows[y] = base + img.index(0, y);
  return encode(img.width(), img.height(), img.channels() == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, 8, rows);
}

std::vector<std::uint8_t> encode_label_png(const LabelImage& labels) {
  require_channels(labels, 1, "encode_label_png");
  if (labels.empty()) throw std::invalid_argument("encode_label_png: empty raster");
  std::vector<std::uint8_t> be(labels.pixel_count() * 2);
  for (std::size_t i = 0; i < labels.pixel_count(); ++i) {
    be[2 * i] = static_cast<std::uint8_t>(labels[i] >> 8);
    be[2 * i + 1] = static_cast<std::uint8_t>(labels[i] & 0xff);
  }
  std::vector<png_bytep> rows(labels.height());
  for (int y = 0; y < labels.height(); ++y) rows[y] = be.data() + static_cast<std::size_t>(y) * labels.width() * 2;
  return encode(labels.width(), labels.height(), PNG_COLOR_TYPE_GRAY, 16, rows);
}

void write_png(const std::filesystem::path& path, const Raster<std::uint8_t>& img) {
  write_file_bytes(path, encode_png(img));
}

void write_label_png(const std::filesystem::path& path, const LabelImage& labels) {
  write_file_bytes(path, encode_label_png(labels));
}

GrayImage read_gray_png(const std::filesystem::path& path) {
  const auto d = decode(read_file_bytes(path));
  if (d.gray && d.channels == 1 && d.bit_depth == 8) {
    GrayImage out(d.width, d.height);
    std::copy(d.data.begin(), d.data.end(), out.data().begin());
    return out;
  }
  return to_gray(to_rgb(d));
}

RgbImage read_rgb_png(const std::filesystem::path& path) {
  return to_rgb(decode(read_file_bytes(path)));
}

LabelImage read_label_png(const std::filesystem::path& path) {
  const auto d = decode(read_file_bytes(path));
  if (!d.gray || d.channels != 1) throw DataError(path.string() + ": label PNG must be single-channel gray");
  LabelImage out(d.width, d.height);
  for (std::size_t i = 0; i < out.pixel_count(); ++i) {
    out[i] = d.bit_depth == 16 ? static_cast<Label>((d.data[2 * i] << 8) | d.data[2 * i + 1]) : d.data[i];
  }
  return out;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("write failed for " + path.string());
}

}  // namespace lart::imaging
