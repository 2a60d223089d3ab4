#pragma once

#include <array>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "symlbp/error.hpp"
#include "symlbp/image.hpp"

namespace symlbp {

/// The three code families: one-sided 8-bit, symmetric 8-bit, symmetric 4-bit.
enum class LbpVariant { standard, symmetric8, symmetric4 };

/// Number of distinct codes a variant produces.
constexpr int code_count(LbpVariant variant) noexcept {
  return variant == LbpVariant::symmetric4 ? 16 : 256;
}

constexpr std::string_view to_string(LbpVariant variant) noexcept {
  switch (variant) {
    case LbpVariant::standard:
      return "st";
    case LbpVariant::symmetric8:
      return "sym8";
    case LbpVariant::symmetric4:
      return "sym4";
  }
  return "?";
}

inline LbpVariant parse_variant(std::string_view name) {
  if (name == "st") return LbpVariant::standard;
  if (name == "sym8") return LbpVariant::symmetric8;
  if (name == "sym4") return LbpVariant::symmetric4;
  throw ArgumentError("unknown LBP variant '" + std::string(name) + "' (st|sym8|sym4)");
}

/// Neighbor displacement from the center, in (row, column) with rows growing downward.
struct Offset {
  int dy;
  int dx;

  constexpr Offset operator-() const noexcept { return {-dy, -dx}; }
  friend constexpr bool operator==(const Offset&, const Offset&) = default;
};

/// Neighbors p1..p8 stored at indices 0..7, clockwise from the top-left corner.
inline constexpr std::array<Offset, 8> kNeighborOffsets{{
    {-1, -1}, {-1, 0}, {-1, 1}, {0, 1}, {1, 1}, {1, 0}, {1, -1}, {0, -1},
}};

/// Index of the neighbor mirrored through the center (p̄ = 2c - p).
constexpr int opposite_index(int index) noexcept { return (index + 4) % 8; }

static_assert([] {
  for (int i = 0; i < 8; ++i) {
    if (kNeighborOffsets[static_cast<std::size_t>(opposite_index(i))] !=
        -kNeighborOffsets[static_cast<std::size_t>(i)]) {
      return false;
    }
  }
  return true;
}());

/// S(p, c): 1 when the neighbor is at least the center.
constexpr std::uint8_t sign_compare(int neighbor_value, int center_value) noexcept {
  return neighbor_value >= center_value ? 1 : 0;
}

/// Central difference (g(p) - g(p̄)) / 2. Exact for 8-bit inputs.
constexpr double symmetric_difference(int forward_value, int backward_value) noexcept {
  return (forward_value - backward_value) / 2.0;
}

/// Hardlim: 0 for negative input, 1 otherwise.
template <typename T>
constexpr std::uint8_t hardlim(T x) noexcept {
  return x >= T{0} ? 1 : 0;
}

namespace detail {

// Per-pixel kernels over three row pointers. Only the sign of each difference
// reaches hardlim, so the /2 of the central difference is dropped.
inline std::uint8_t standard_code(const std::uint8_t* up, const std::uint8_t* mid,
                                  const std::uint8_t* down, std::size_t x) noexcept {
  const int c = mid[x];
  return static_cast<std::uint8_t>((up[x - 1] >= c) | (up[x] >= c) << 1 |
                                   (up[x + 1] >= c) << 2 | (mid[x + 1] >= c) << 3 |
                                   (down[x + 1] >= c) << 4 | (down[x] >= c) << 5 |
                                   (down[x - 1] >= c) << 6 | (mid[x - 1] >= c) << 7);
}

// Bits for d5..d8: p5 - p1, p6 - p2, p7 - p3, p8 - p4.
inline std::uint8_t symmetric4_code(const std::uint8_t* up, const std::uint8_t* mid,
                                    const std::uint8_t* down, std::size_t x) noexcept {
  return static_cast<std::uint8_t>((down[x + 1] >= up[x - 1]) | (down[x] >= up[x]) << 1 |
                                   (down[x - 1] >= up[x + 1]) << 2 |
                                   (mid[x - 1] >= mid[x + 1]) << 3);
}

inline std::uint8_t symmetric8_code(const std::uint8_t* up, const std::uint8_t* mid,
                                    const std::uint8_t* down, std::size_t x) noexcept {
  const auto low = static_cast<std::uint8_t>(
      (up[x - 1] >= down[x + 1]) | (up[x] >= down[x]) << 1 | (up[x + 1] >= down[x - 1]) << 2 |
      (mid[x + 1] >= mid[x - 1]) << 3);
  return static_cast<std::uint8_t>(low | symmetric4_code(up, mid, down, x) << 4);
}

inline void check_interior(const GrayImage& img, int x, int y) {
  if (x < 1 || y < 1 || x > img.width() - 2 || y > img.height() - 2) {
    throw BoundsError("(" + std::to_string(x) + ", " + std::to_string(y) +
                      ") is not an interior pixel of a " + std::to_string(img.width()) + "x" +
                      std::to_string(img.height()) + " image");
  }
}

}  // namespace detail

/// Code of the interior pixel at column x, row y.
inline std::uint8_t code_at(const GrayImage& img, int x, int y, LbpVariant variant) {
  detail::check_interior(img, x, y);
  const auto* up = img.row(y - 1).data();
  const auto* mid = img.row(y).data();
  const auto* down = img.row(y + 1).data();
  const auto col = static_cast<std::size_t>(x);
  switch (variant) {
    case LbpVariant::standard:
      return detail::standard_code(up, mid, down, col);
    case LbpVariant::symmetric8:
      return detail::symmetric8_code(up, mid, down, col);
    case LbpVariant::symmetric4:
      return detail::symmetric4_code(up, mid, down, col);
  }
  return 0;
}

/// Codes for the (W-2) x (H-2) interior of a source image.
class LbpCodeMap {
 public:
  LbpCodeMap(int source_width, int source_height, LbpVariant variant,
             std::vector<std::uint8_t> codes)
      : source_width_(source_width),
        source_height_(source_height),
        variant_(variant),
        codes_(std::move(codes)) {}

  int source_width() const noexcept { return source_width_; }
  int source_height() const noexcept { return source_height_; }
  int width() const noexcept { return source_width_ - 2; }
  int height() const noexcept { return source_height_ - 2; }
  LbpVariant variant() const noexcept { return variant_; }

  /// Code at interior coordinates (0-based; source pixel is (x + 1, y + 1)).
  std::uint8_t at(int x, int y) const noexcept {
    return codes_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width()) +
                  static_cast<std::size_t>(x)];
  }

  std::span<const std::uint8_t> row(int y) const noexcept {
    return {codes_.data() + static_cast<std::size_t>(y) * static_cast<std::size_t>(width()),
            static_cast<std::size_t>(width())};
  }

  std::span<const std::uint8_t> codes() const noexcept { return codes_; }

  friend bool operator==(const LbpCodeMap&, const LbpCodeMap&) = default;

 private:
  int source_width_;
  int source_height_;
  LbpVariant variant_;
  std::vector<std::uint8_t> codes_;
};

namespace detail {

template <typename Kernel>
void fill_codes(const GrayImage& img, std::uint8_t* out, Kernel kernel) {
  const auto inner = static_cast<std::size_t>(img.width() - 2);
  for (int y = 1; y < img.height() - 1; ++y) {
    const auto* up = img.row(y - 1).data();
    const auto* mid = img.row(y).data();
    const auto* down = img.row(y + 1).data();
    for (std::size_t x = 1; x <= inner; ++x) *out++ = kernel(up, mid, down, x);
  }
}

}  // namespace detail

inline LbpCodeMap compute_code_map(const GrayImage& img, LbpVariant variant) {
  std::vector<std::uint8_t> codes(static_cast<std::size_t>(img.width() - 2) *
                                  static_cast<std::size_t>(img.height() - 2));
  switch (variant) {
    case LbpVariant::standard:
      detail::fill_codes(img, codes.data(), detail::standard_code);
      break;
    case LbpVariant::symmetric8:
      detail::fill_codes(img, codes.data(), detail::symmetric8_code);
      break;
    case LbpVariant::symmetric4:
      detail::fill_codes(img, codes.data(), detail::symmetric4_code);
      break;
  }
  return LbpCodeMap(img.width(), img.height(), variant, std::move(codes));
}

/// One CSV line per interior row, integer codes separated by commas.
inline void write_code_map_csv(std::ostream& out, const LbpCodeMap& map) {
  for (int y = 0; y < map.height(); ++y) {
    const auto row = map.row(y);
    for (std::size_t x = 0; x < row.size(); ++x) {
      if (x) out << ',';
      out << static_cast<int>(row[x]);
    }
    out << '\n';
  }
}

}  // namespace symlbp
