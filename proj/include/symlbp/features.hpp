#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "symlbp/descriptor.hpp"
#include "symlbp/error.hpp"
#include "symlbp/image.hpp"

namespace symlbp {

/// Code frequencies; total is the number of coded pixels counted.
struct Histogram {
  std::vector<std::uint64_t> bins;
  std::uint64_t total = 0;

  std::size_t size() const noexcept { return bins.size(); }
  friend bool operator==(const Histogram&, const Histogram&) = default;
};

/// Counts the codes of a region given in source-image coordinates. The region
/// is clipped to the interior, where codes exist.
inline Histogram histogram(const LbpCodeMap& codes, const Rect& region) {
  const int x0 = std::max(region.x, 1);
  const int y0 = std::max(region.y, 1);
  const int x1 = std::min(region.x + region.width, codes.source_width() - 1);
  const int y1 = std::min(region.y + region.height, codes.source_height() - 1);
  if (x0 >= x1 || y0 >= y1) {
    throw EmptyRegionError("region (" + std::to_string(region.x) + ", " +
                           std::to_string(region.y) + ", " + std::to_string(region.width) +
                           "x" + std::to_string(region.height) + ") has no coded pixels");
  }
  Histogram h{std::vector<std::uint64_t>(static_cast<std::size_t>(code_count(codes.variant()))),
              0};
  for (int y = y0; y < y1; ++y) {
    const auto row = codes.row(y - 1);
    for (int x = x0; x < x1; ++x) ++h.bins[row[static_cast<std::size_t>(x - 1)]];
  }
  h.total = static_cast<std::uint64_t>(x1 - x0) * static_cast<std::uint64_t>(y1 - y0);
  return h;
}

inline Histogram histogram(const LbpCodeMap& codes) {
  return histogram(codes, Rect{0, 0, codes.source_width(), codes.source_height()});
}

/// Merges consecutive equal-width groups of bins down to target_bins.
inline Histogram reduce_histogram(const Histogram& h, int target_bins) {
  const auto source = static_cast<int>(h.size());
  if (target_bins < 1 || target_bins > source || source % target_bins != 0) {
    throw ArgumentError("cannot reduce " + std::to_string(source) + " bins to " +
                        std::to_string(target_bins));
  }
  const auto group = static_cast<std::size_t>(source / target_bins);
  Histogram out{std::vector<std::uint64_t>(static_cast<std::size_t>(target_bins)), h.total};
  for (std::size_t k = 0; k < h.bins.size(); ++k) out.bins[k / group] += h.bins[k];
  return out;
}

/// Concatenated L1-normalized region histograms, region-major.
struct FeatureVector {
  std::vector<double> values;
  int regions = 0;
  int bins_per_region = 0;

  std::span<const double> region(int index) const {
    return std::span<const double>(values).subspan(
        static_cast<std::size_t>(index) * static_cast<std::size_t>(bins_per_region),
        static_cast<std::size_t>(bins_per_region));
  }
};

/// Bins per region after optional reduction. SyLBP4 is already 16 bins, so a
/// reduction request of 16 is a no-op for it and any other target is rejected.
inline int feature_bins(LbpVariant variant, std::optional<int> reduce_to) {
  const int raw = code_count(variant);
  if (!reduce_to) return raw;
  if (variant == LbpVariant::symmetric4) {
    if (*reduce_to != raw) {
      throw ArgumentError("sym4 produces 16 codes directly; reduction to " +
                          std::to_string(*reduce_to) + " is not supported");
    }
    return raw;
  }
  if (*reduce_to < 1 || *reduce_to > raw || raw % *reduce_to != 0) {
    throw ArgumentError("reduction target " + std::to_string(*reduce_to) +
                        " does not divide 256");
  }
  return *reduce_to;
}

inline FeatureVector features_from_codes(const LbpCodeMap& codes, const RegionGrid& grid,
                                         std::optional<int> reduce_to) {
  const int bins = feature_bins(codes.variant(), reduce_to);
  FeatureVector fv{{}, static_cast<int>(grid.size()), bins};
  fv.values.reserve(grid.size() * static_cast<std::size_t>(bins));
  for (const Rect& rect : grid.rects) {
    Histogram h = histogram(codes, rect);
    if (static_cast<int>(h.size()) != bins) h = reduce_histogram(h, bins);
    const auto total = static_cast<double>(h.total);
    for (std::uint64_t count : h.bins) fv.values.push_back(static_cast<double>(count) / total);
  }
  return fv;
}

inline FeatureVector extract_features(const GrayImage& img, LbpVariant variant,
                                      const RegionGrid& grid,
                                      std::optional<int> reduce_to = std::nullopt) {
  if (grid.rects.empty() || grid.rects.back().x + grid.rects.back().width != img.width() ||
      grid.rects.back().y + grid.rects.back().height != img.height()) {
    throw SizeError("region grid does not match a " + std::to_string(img.width()) + "x" +
                    std::to_string(img.height()) + " image");
  }
  return features_from_codes(compute_code_map(img, variant), grid, reduce_to);
}

}  // namespace symlbp
