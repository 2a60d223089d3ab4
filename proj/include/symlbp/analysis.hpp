#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "symlbp/descriptor.hpp"
#include "symlbp/error.hpp"
#include "symlbp/image.hpp"

namespace symlbp {

/// How the directional derivative d_i is approximated.
enum class DifferenceScheme {
  one_sided,  // g(p_i) - g(c)
  symmetric,  // (g(p_i) - g(p̄_i)) / 2
};

constexpr std::string_view to_string(DifferenceScheme scheme) noexcept {
  return scheme == DifferenceScheme::one_sided ? "onesided" : "symmetric";
}

inline DifferenceScheme parse_scheme(std::string_view name) {
  if (name == "onesided") return DifferenceScheme::one_sided;
  if (name == "symmetric") return DifferenceScheme::symmetric;
  throw ArgumentError("unknown difference scheme '" + std::string(name) +
                      "' (onesided|symmetric)");
}

/// The eight directional derivative estimates d_1..d_8 at an interior pixel.
inline std::array<double, 8> directional_derivatives(const GrayImage& img, int x, int y,
                                                     DifferenceScheme scheme) {
  detail::check_interior(img, x, y);
  std::array<double, 8> d{};
  for (std::size_t i = 0; i < 8; ++i) {
    const Offset v = kNeighborOffsets[i];
    const int forward = img.at(x + v.dx, y + v.dy);
    d[i] = scheme == DifferenceScheme::one_sided
               ? static_cast<double>(forward - img.at(x, y))
               : symmetric_difference(forward, img.at(x - v.dx, y - v.dy));
  }
  return d;
}

/// Binary maps H(d_i) over the interior, one per direction.
struct HardlimPlanes {
  int width = 0;
  int height = 0;
  DifferenceScheme scheme = DifferenceScheme::symmetric;
  std::array<std::vector<std::uint8_t>, 8> planes;

  std::uint8_t at(int plane, int x, int y) const noexcept {
    return planes[static_cast<std::size_t>(plane)]
                 [static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                  static_cast<std::size_t>(x)];
  }
};

inline HardlimPlanes hardlim_planes(const GrayImage& img, DifferenceScheme scheme) {
  HardlimPlanes out{img.width() - 2, img.height() - 2, scheme, {}};
  const auto count = static_cast<std::size_t>(out.width) * static_cast<std::size_t>(out.height);
  for (auto& plane : out.planes) plane.resize(count);
  std::size_t k = 0;
  for (int y = 1; y < img.height() - 1; ++y) {
    for (int x = 1; x < img.width() - 1; ++x, ++k) {
      const int center = img.at(x, y);
      for (std::size_t i = 0; i < 8; ++i) {
        const Offset v = kNeighborOffsets[i];
        const int reference =
            scheme == DifferenceScheme::one_sided ? center : img.at(x - v.dx, y - v.dy);
        out.planes[i][k] = hardlim(img.at(x + v.dx, y + v.dy) - reference);
      }
    }
  }
  return out;
}

/// 8x8 Pearson correlations; an entry is empty when either variable is constant.
class CorrelationMatrix {
 public:
  std::optional<double> at(int i, int j) const noexcept {
    return entries_[static_cast<std::size_t>(i * 8 + j)];
  }
  void set(int i, int j, std::optional<double> value) noexcept {
    entries_[static_cast<std::size_t>(i * 8 + j)] = value;
  }

 private:
  std::array<std::optional<double>, 64> entries_{};
};

/// Pearson correlation of the planes as flat samples over all interior pixels.
/// Binary variables let the moments be accumulated as exact integer counts.
inline CorrelationMatrix correlation_matrix(const HardlimPlanes& planes) {
  const auto n = static_cast<std::int64_t>(planes.planes[0].size());
  if (n == 0) throw ArgumentError("correlation of empty planes");
  std::array<std::int64_t, 8> ones{};
  std::array<std::array<std::int64_t, 8>, 8> both{};
  for (std::size_t k = 0; k < static_cast<std::size_t>(n); ++k) {
    std::array<std::uint8_t, 8> bits{};
    for (std::size_t i = 0; i < 8; ++i) bits[i] = planes.planes[i][k];
    for (std::size_t i = 0; i < 8; ++i) {
      if (!bits[i]) continue;
      ++ones[i];
      for (std::size_t j = i; j < 8; ++j) both[i][j] += bits[j];
    }
  }
  CorrelationMatrix m;
  for (int i = 0; i < 8; ++i) {
    const auto si = ones[static_cast<std::size_t>(i)];
    const std::int64_t var_i = n * si - si * si;  // n^2 * variance
    for (int j = i; j < 8; ++j) {
      const auto sj = ones[static_cast<std::size_t>(j)];
      const std::int64_t var_j = n * sj - sj * sj;
      std::optional<double> r;
      if (var_i > 0 && var_j > 0) {
        const std::int64_t cov =
            n * both[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] - si * sj;
        r = static_cast<double>(cov) /
            std::sqrt(static_cast<double>(var_i) * static_cast<double>(var_j));
      }
      m.set(i, j, r);
      m.set(j, i, r);
    }
  }
  return m;
}

/// 8 lines of 8 comma-separated entries, "NA" where undefined.
inline void write_correlation_csv(std::ostream& out, const CorrelationMatrix& m) {
  char buf[32];
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 8; ++j) {
      if (j) out << ',';
      if (const auto r = m.at(i, j)) {
        std::snprintf(buf, sizeof buf, "%.17g", *r);
        out << buf;
      } else {
        out << "NA";
      }
    }
    out << '\n';
  }
}

}  // namespace symlbp
