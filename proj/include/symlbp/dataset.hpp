#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <map>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "json.hpp"
#include "symlbp/error.hpp"
#include "symlbp/image.hpp"

namespace symlbp {

struct ManifestEntry {
  std::filesystem::path path;
  std::string label;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

/// Images of a class-per-directory corpus, sorted by (label, path).
struct DatasetManifest {
  std::vector<ManifestEntry> entries;
  std::vector<std::filesystem::path> skipped;  // files that failed to decode

  /// Sorted distinct labels.
  std::vector<std::string> labels() const {
    std::vector<std::string> out;
    for (const auto& e : entries) out.push_back(e.label);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  /// Index of each entry's label within labels().
  std::vector<std::size_t> label_indices() const {
    const auto names = labels();
    std::vector<std::size_t> out;
    out.reserve(entries.size());
    for (const auto& e : entries) {
      out.push_back(static_cast<std::size_t>(
          std::lower_bound(names.begin(), names.end(), e.label) - names.begin()));
    }
    return out;
  }
};

/// Walks root/<label>/<file>. Files that do not decode as images land in the
/// skip list instead of failing the whole ingest.
inline DatasetManifest ingest(const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw IoError("not a directory: " + root.string());
  DatasetManifest manifest;
  try {
    for (const auto& class_dir : fs::directory_iterator(root)) {
      if (!class_dir.is_directory()) continue;
      const std::string label = class_dir.path().filename().string();
      if (label.empty() || label.front() == '.') continue;
      for (const auto& file : fs::directory_iterator(class_dir.path())) {
        if (!file.is_regular_file() || file.path().filename().string().front() == '.') continue;
        try {
          (void)load_image(file.path());
          manifest.entries.push_back({file.path(), label});
        } catch (const Error&) {
          manifest.skipped.push_back(file.path());
        }
      }
    }
  } catch (const fs::filesystem_error& e) {
    throw IoError(e.what());
  }
  if (manifest.entries.empty()) {
    throw EmptyDatasetError("no decodable images under " + root.string());
  }
  std::sort(manifest.entries.begin(), manifest.entries.end(),
            [](const ManifestEntry& a, const ManifestEntry& b) {
              return std::tie(a.label, a.path) < std::tie(b.label, b.path);
            });
  std::sort(manifest.skipped.begin(), manifest.skipped.end());
  return manifest;
}

struct SplitSpec {
  double train_fraction = 0.7;
  std::uint64_t seed = 0;
  bool stratified = true;
};

/// Sample indices of each side, ascending.
struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

namespace detail {

// round-half-up, clamped so both sides keep at least one sample
inline std::size_t train_count(std::size_t size, double fraction) {
  const auto raw = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(size) + 0.5));
  return std::clamp<std::size_t>(raw, 1, size - 1);
}

inline void shuffle_indices(std::vector<std::size_t>& v, std::mt19937_64& rng) {
  for (std::size_t k = v.size(); k > 1; --k) {
    std::swap(v[k - 1], v[static_cast<std::size_t>(rng() % k)]);
  }
}

}  // namespace detail

/// Seeded train/test partition of samples labelled by class index.
inline SplitIndices split_indices(std::span<const std::size_t> labels, const SplitSpec& spec) {
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
    throw ArgumentError("train fraction must lie in (0, 1)");
  }
  std::map<std::size_t, std::vector<std::size_t>> groups;
  if (spec.stratified) {
    for (std::size_t i = 0; i < labels.size(); ++i) groups[labels[i]].push_back(i);
  } else {
    auto& all = groups[0];
    for (std::size_t i = 0; i < labels.size(); ++i) all.push_back(i);
  }
  std::mt19937_64 rng(spec.seed);
  SplitIndices out;
  for (auto& [label, members] : groups) {
    if (members.size() < 2) {
      throw InfeasibleSplitError(spec.stratified
                                     ? "class " + std::to_string(label) +
                                           " has fewer than 2 samples"
                                     : std::string("fewer than 2 samples"));
    }
    detail::shuffle_indices(members, rng);
    const std::size_t n_train = detail::train_count(members.size(), spec.train_fraction);
    out.train.insert(out.train.end(), members.begin(), members.begin() + static_cast<long>(n_train));
    out.test.insert(out.test.end(), members.begin() + static_cast<long>(n_train), members.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

struct ManifestSplit {
  DatasetManifest train;
  DatasetManifest test;
};

inline ManifestSplit split(const DatasetManifest& manifest, const SplitSpec& spec) {
  const auto labels = manifest.label_indices();
  const auto idx = split_indices(labels, spec);
  ManifestSplit out;
  for (std::size_t i : idx.train) out.train.entries.push_back(manifest.entries[i]);
  for (std::size_t i : idx.test) out.test.entries.push_back(manifest.entries[i]);
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic texture corpus

enum class TextureRecipe { vertical_stripes, horizontal_stripes, checkerboard, flat_noise };

constexpr std::string_view to_string(TextureRecipe recipe) noexcept {
  switch (recipe) {
    case TextureRecipe::vertical_stripes:
      return "vertical_stripes";
    case TextureRecipe::horizontal_stripes:
      return "horizontal_stripes";
    case TextureRecipe::checkerboard:
      return "checkerboard";
    case TextureRecipe::flat_noise:
      return "flat_noise";
  }
  return "?";
}

inline TextureRecipe parse_recipe(std::string_view name) {
  for (auto r : {TextureRecipe::vertical_stripes, TextureRecipe::horizontal_stripes,
                 TextureRecipe::checkerboard, TextureRecipe::flat_noise}) {
    if (to_string(r) == name) return r;
  }
  throw ArgumentError("unknown texture recipe '" + std::string(name) + "'");
}

struct SyntheticSpec {
  std::vector<TextureRecipe> recipes{TextureRecipe::vertical_stripes,
                                     TextureRecipe::horizontal_stripes,
                                     TextureRecipe::checkerboard};
  int width = 64;
  int height = 64;
  int period = 4;
  int noise = 20;      // per-pixel uniform noise in [-noise, +noise]
  int count = 50;      // images per class
  int low = 64;        // dark stripe level
  int high = 192;      // bright stripe level
  std::uint64_t seed = 1;

  void validate() const {
    if (recipes.empty()) throw ArgumentError("synthetic spec needs at least one recipe");
    if (width < kMinImageSide || height < kMinImageSide) {
      throw SizeError("synthetic images must be at least 3x3");
    }
    if (period < 1) throw ArgumentError("period must be >= 1");
    if (noise < 0 || noise > 255) throw ArgumentError("noise must lie in [0, 255]");
    if (count < 1) throw ArgumentError("count must be >= 1");
    if (low < 0 || low > 255 || high < 0 || high > 255) {
      throw ArgumentError("levels must lie in [0, 255]");
    }
  }
};

inline SyntheticSpec synthetic_spec_from_json(const nlohmann::json& j) {
  SyntheticSpec spec;
  try {
    if (j.contains("classes")) {
      spec.recipes.clear();
      for (const auto& name : j.at("classes")) spec.recipes.push_back(parse_recipe(name.get<std::string>()));
    }
    spec.width = j.value("width", spec.width);
    spec.height = j.value("height", spec.height);
    spec.period = j.value("period", spec.period);
    spec.noise = j.value("noise", spec.noise);
    spec.count = j.value("count", spec.count);
    spec.low = j.value("low", spec.low);
    spec.high = j.value("high", spec.high);
    spec.seed = j.value("seed", spec.seed);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed synthetic spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

/// Noise-free recipe value at (x, y). Flat images sit midway between the levels.
inline int recipe_level(const SyntheticSpec& spec, TextureRecipe recipe, int x, int y) {
  const bool col_odd = (x / spec.period) % 2 != 0;
  const bool row_odd = (y / spec.period) % 2 != 0;
  switch (recipe) {
    case TextureRecipe::vertical_stripes:
      return col_odd ? spec.high : spec.low;
    case TextureRecipe::horizontal_stripes:
      return row_odd ? spec.high : spec.low;
    case TextureRecipe::checkerboard:
      return (col_odd != row_odd) ? spec.high : spec.low;
    case TextureRecipe::flat_noise:
      return (spec.low + spec.high) / 2;
  }
  return 0;
}

/// Images are drawn class by class from one generator seeded with spec.seed.
inline std::vector<std::vector<GrayImage>> synthesize(const SyntheticSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  const auto span = static_cast<std::uint64_t>(2 * spec.noise + 1);
  std::vector<std::vector<GrayImage>> out;
  for (TextureRecipe recipe : spec.recipes) {
    auto& images = out.emplace_back();
    for (int n = 0; n < spec.count; ++n) {
      std::vector<std::uint8_t> px;
      px.reserve(static_cast<std::size_t>(spec.width) * static_cast<std::size_t>(spec.height));
      for (int y = 0; y < spec.height; ++y) {
        for (int x = 0; x < spec.width; ++x) {
          const int jitter = spec.noise ? static_cast<int>(rng() % span) - spec.noise : 0;
          px.push_back(static_cast<std::uint8_t>(
              std::clamp(recipe_level(spec, recipe, x, y) + jitter, 0, 255)));
        }
      }
      images.emplace_back(spec.width, spec.height, std::move(px));
    }
  }
  return out;
}

/// Writes out/<recipe>/<recipe>_NNNN.pgm and returns the manifest of the result.
inline DatasetManifest generate_synthetic(const SyntheticSpec& spec,
                                          const std::filesystem::path& out) {
  namespace fs = std::filesystem;
  const auto corpus = synthesize(spec);
  DatasetManifest manifest;
  std::error_code ec;
  for (std::size_t r = 0; r < spec.recipes.size(); ++r) {
    const std::string label(to_string(spec.recipes[r]));
    const fs::path dir = out / label;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    for (std::size_t n = 0; n < corpus[r].size(); ++n) {
      char name[64];
      std::snprintf(name, sizeof name, "%s_%04zu.pgm", label.c_str(), n);
      save_pgm(corpus[r][n], dir / name);
      manifest.entries.push_back({dir / name, label});
    }
  }
  std::sort(manifest.entries.begin(), manifest.entries.end(),
            [](const ManifestEntry& a, const ManifestEntry& b) {
              return std::tie(a.label, a.path) < std::tie(b.label, b.path);
            });
  return manifest;
}

}  // namespace symlbp
