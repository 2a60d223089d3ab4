#pragma once

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "symlbp/error.hpp"

namespace symlbp {

/// Smallest image side that still hosts one interior pixel.
inline constexpr int kMinImageSide = 3;

/// Immutable 8-bit grayscale raster, row-major.
class GrayImage {
 public:
  GrayImage(int width, int height, std::vector<std::uint8_t> data)
      : width_(width), height_(height), data_(std::move(data)) {
    if (width < kMinImageSide || height < kMinImageSide) {
      throw SizeError("image must be at least 3x3, got " + std::to_string(width) + "x" +
                      std::to_string(height));
    }
    if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
      throw ArgumentError("image data length does not match width*height");
    }
  }

  GrayImage(int width, int height, std::uint8_t fill)
      : GrayImage(width, height,
                  std::vector<std::uint8_t>(static_cast<std::size_t>(std::max(width, 0)) *
                                                static_cast<std::size_t>(std::max(height, 0)),
                                            fill)) {}

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }

  std::uint8_t at(int x, int y) const noexcept {
    return data_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                 static_cast<std::size_t>(x)];
  }

  std::span<const std::uint8_t> row(int y) const noexcept {
    return {data_.data() + static_cast<std::size_t>(y) * static_cast<std::size_t>(width_),
            static_cast<std::size_t>(width_)};
  }

  std::span<const std::uint8_t> pixels() const noexcept { return data_; }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> data_;
};

namespace detail {

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed: " + path.string());
  return bytes;
}

inline void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

// Header tokens are separated by whitespace; '#' starts a comment running to end of line.
inline std::string_view next_pnm_token(std::string_view bytes, std::size_t& pos) {
  while (pos < bytes.size()) {
    const char ch = bytes[pos];
    if (ch == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n' && bytes[pos] != '\r') ++pos;
    } else if (std::isspace(static_cast<unsigned char>(ch))) {
      ++pos;
    } else {
      break;
    }
  }
  const std::size_t start = pos;
  while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos])) &&
         bytes[pos] != '#') {
    ++pos;
  }
  return bytes.substr(start, pos - start);
}

inline long parse_pnm_number(std::string_view token, const char* what) {
  if (token.empty() || token.size() > 9) throw FormatError(std::string("bad PGM ") + what);
  long value = 0;
  for (char ch : token) {
    if (ch < '0' || ch > '9') throw FormatError(std::string("bad PGM ") + what);
    value = value * 10 + (ch - '0');
  }
  return value;
}

inline std::uint32_t read_be32(std::string_view bytes, std::size_t offset) {
  return (static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[offset])) << 24) |
         (static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[offset + 1])) << 16) |
         (static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[offset + 2])) << 8) |
         static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[offset + 3]));
}

inline constexpr std::string_view kPngSignature{"\x89PNG\r\n\x1a\n", 8};

}  // namespace detail

/// Decodes a binary PGM (P5, maxval 255).
inline GrayImage decode_pgm(std::string_view bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
    throw FormatError("not a binary PGM (P5) stream");
  }
  std::size_t pos = 2;
  const long width = detail::parse_pnm_number(detail::next_pnm_token(bytes, pos), "width");
  const long height = detail::parse_pnm_number(detail::next_pnm_token(bytes, pos), "height");
  const long maxval = detail::parse_pnm_number(detail::next_pnm_token(bytes, pos), "maxval");
  if (maxval != 255) {
    throw FormatError("unsupported PGM maxval " + std::to_string(maxval) + " (only 255)");
  }
  if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
    throw FormatError("truncated PGM header");
  }
  ++pos;
  if (width < kMinImageSide || height < kMinImageSide) {
    throw SizeError("image must be at least 3x3, got " + std::to_string(width) + "x" +
                    std::to_string(height));
  }
  const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (bytes.size() - pos < count) throw FormatError("truncated PGM raster");
  std::vector<std::uint8_t> data(count);
  std::memcpy(data.data(), bytes.data() + pos, count);
  return GrayImage(static_cast<int>(width), static_cast<int>(height), std::move(data));
}

inline std::string encode_pgm(const GrayImage& img) {
  std::string out = "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) +
                    "\n255\n";
  const auto px = img.pixels();
  out.append(reinterpret_cast<const char*>(px.data()), px.size());
  return out;
}

inline void save_pgm(const GrayImage& img, const std::filesystem::path& path) {
  detail::write_file(path, encode_pgm(img));
}

/// Decodes an 8-bit grayscale PNG. Any other color type or bit depth is rejected.
inline GrayImage decode_png(std::string_view bytes) {
  // Signature (8) + IHDR length/type (8) + width, height, depth, color type.
  if (bytes.size() < 33 || bytes.substr(0, 8) != detail::kPngSignature ||
      bytes.substr(12, 4) != "IHDR") {
    throw FormatError("not a PNG stream");
  }
  const auto bit_depth = static_cast<unsigned char>(bytes[24]);
  const auto color_type = static_cast<unsigned char>(bytes[25]);
  if (color_type != PNG_COLOR_TYPE_GRAY) {
    throw FormatError("PNG is not grayscale (color type " + std::to_string(color_type) + ")");
  }
  if (bit_depth != 8) {
    throw FormatError("unsupported PNG bit depth " + std::to_string(bit_depth) + " (only 8)");
  }
  const std::uint32_t width = detail::read_be32(bytes, 16);
  const std::uint32_t height = detail::read_be32(bytes, 20);
  if (width < kMinImageSide || height < kMinImageSide) {
    throw SizeError("image must be at least 3x3, got " + std::to_string(width) + "x" +
                    std::to_string(height));
  }

  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw FormatError(std::string("PNG decode failed: ") + image.message);
  }
  image.format = PNG_FORMAT_GRAY;
  std::vector<std::uint8_t> data(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, data.data(), 0, nullptr)) {
    const std::string message = image.message;
    png_image_free(&image);
    throw FormatError("PNG decode failed: " + message);
  }
  return GrayImage(static_cast<int>(image.width), static_cast<int>(image.height),
                   std::move(data));
}

/// Loads a P5 PGM or 8-bit grayscale PNG, chosen by magic bytes.
inline GrayImage load_image(const std::filesystem::path& path) {
  const std::string bytes = detail::read_file(path);
  if (bytes.size() >= 8 && std::string_view(bytes).substr(0, 8) == detail::kPngSignature) {
    return decode_png(bytes);
  }
  if (bytes.size() >= 2 && bytes[0] == 'P') {
    if (bytes[1] != '5') throw FormatError("unsupported PNM magic P" + std::string(1, bytes[1]));
    return decode_pgm(bytes);
  }
  throw FormatError("unrecognized image format: " + path.string());
}

/// Nearest-neighbor resampling; output (x, y) copies source (x*W/w, y*H/h), floored.
inline GrayImage resize_nearest(const GrayImage& img, int new_width, int new_height) {
  if (new_width < kMinImageSide || new_height < kMinImageSide) {
    throw SizeError("resize target must be at least 3x3");
  }
  std::vector<std::uint8_t> out(static_cast<std::size_t>(new_width) *
                                static_cast<std::size_t>(new_height));
  std::vector<int> src_x(static_cast<std::size_t>(new_width));
  for (int x = 0; x < new_width; ++x) {
    src_x[static_cast<std::size_t>(x)] =
        static_cast<int>(static_cast<long long>(x) * img.width() / new_width);
  }
  auto dst = out.begin();
  for (int y = 0; y < new_height; ++y) {
    const auto src_row =
        img.row(static_cast<int>(static_cast<long long>(y) * img.height() / new_height));
    for (int sx : src_x) *dst++ = src_row[static_cast<std::size_t>(sx)];
  }
  return GrayImage(new_width, new_height, std::move(out));
}

struct Rect {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;

  friend bool operator==(const Rect&, const Rect&) = default;
};

/// Row-major tiling of an image into rows x cols rectangles.
struct RegionGrid {
  int rows = 0;
  int cols = 0;
  std::vector<Rect> rects;

  const Rect& at(int row, int col) const {
    return rects[static_cast<std::size_t>(row) * static_cast<std::size_t>(cols) +
                 static_cast<std::size_t>(col)];
  }
  std::size_t size() const noexcept { return rects.size(); }
};

/// Cells are floor(W/cols) x floor(H/rows); the last column and row absorb the remainder.
inline RegionGrid make_region_grid(int width, int height, int rows, int cols) {
  if (rows < 1 || cols < 1) throw ArgumentError("grid rows and cols must be >= 1");
  if (rows > height || cols > width) throw SizeError("grid is finer than the image");
  const int cell_w = width / cols;
  const int cell_h = height / rows;
  if (cell_w < kMinImageSide || cell_h < kMinImageSide) {
    throw SizeError("grid " + std::to_string(rows) + "x" + std::to_string(cols) +
                    " gives regions smaller than 3x3 on a " + std::to_string(width) + "x" +
                    std::to_string(height) + " image");
  }
  RegionGrid grid{rows, cols, {}};
  grid.rects.reserve(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
  for (int r = 0; r < rows; ++r) {
    const int y0 = r * cell_h;
    const int h = (r == rows - 1) ? height - y0 : cell_h;
    for (int c = 0; c < cols; ++c) {
      const int x0 = c * cell_w;
      const int w = (c == cols - 1) ? width - x0 : cell_w;
      grid.rects.push_back({x0, y0, w, h});
    }
  }
  return grid;
}

inline RegionGrid make_region_grid(const GrayImage& img, int rows, int cols) {
  return make_region_grid(img.width(), img.height(), rows, cols);
}

}  // namespace symlbp
