#pragma once

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "json.hpp"
#include "symlbp/dataset.hpp"
#include "symlbp/descriptor.hpp"
#include "symlbp/error.hpp"
#include "symlbp/features.hpp"
#include "symlbp/image.hpp"
#include "symlbp/svm.hpp"

namespace symlbp {

/// How images become feature vectors.
struct FeatureOptions {
  LbpVariant variant = LbpVariant::symmetric4;
  int grid_rows = 4;
  int grid_cols = 4;
  std::optional<int> reduce_to;
  std::optional<std::pair<int, int>> resize;  // (width, height) applied before coding
};

/// Identifies the feature space a table or model lives in.
struct FeatureLayout {
  LbpVariant variant = LbpVariant::symmetric4;
  int grid_rows = 0;
  int grid_cols = 0;
  int bins = 0;

  std::size_t dimension() const noexcept {
    return static_cast<std::size_t>(grid_rows) * static_cast<std::size_t>(grid_cols) *
           static_cast<std::size_t>(bins);
  }
  friend bool operator==(const FeatureLayout&, const FeatureLayout&) = default;
};

inline FeatureLayout layout_of(const FeatureOptions& options) {
  return {options.variant, options.grid_rows, options.grid_cols,
          feature_bins(options.variant, options.reduce_to)};
}

inline nlohmann::json to_json(const FeatureLayout& layout) {
  return {{"variant", to_string(layout.variant)},
          {"grid", std::to_string(layout.grid_rows) + "x" + std::to_string(layout.grid_cols)},
          {"bins", layout.bins}};
}

/// Parses "RxC".
inline std::pair<int, int> parse_grid(std::string_view text) {
  const auto x = text.find('x');
  if (x == std::string_view::npos) throw ArgumentError("grid must look like RxC");
  int rows = 0;
  int cols = 0;
  const std::string r(text.substr(0, x));
  const std::string c(text.substr(x + 1));
  char* end = nullptr;
  rows = static_cast<int>(std::strtol(r.c_str(), &end, 10));
  if (r.empty() || *end) throw ArgumentError("bad grid rows in '" + std::string(text) + "'");
  cols = static_cast<int>(std::strtol(c.c_str(), &end, 10));
  if (c.empty() || *end) throw ArgumentError("bad grid cols in '" + std::string(text) + "'");
  if (rows < 1 || cols < 1) throw ArgumentError("grid dimensions must be >= 1");
  return {rows, cols};
}

inline FeatureLayout feature_layout_from_json(const nlohmann::json& j) {
  const auto [rows, cols] = parse_grid(j.at("grid").get<std::string>());
  return {parse_variant(j.at("variant").get<std::string>()), rows, cols,
          j.at("bins").get<int>()};
}

/// Labelled feature rows sharing one layout.
struct FeatureTable {
  FeatureLayout layout;
  std::vector<std::string> labels;
  std::vector<std::vector<double>> rows;

  std::vector<std::string> classes() const {
    std::vector<std::string> out = labels;
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  /// Index of each row's label within `classes`; throws for unknown labels.
  std::vector<std::size_t> label_indices(const std::vector<std::string>& classes) const {
    std::vector<std::size_t> out;
    out.reserve(labels.size());
    for (const auto& label : labels) {
      const auto it = std::find(classes.begin(), classes.end(), label);
      if (it == classes.end()) throw ArgumentError("unknown class label '" + label + "'");
      out.push_back(static_cast<std::size_t>(it - classes.begin()));
    }
    return out;
  }
};

inline FeatureVector image_features(const GrayImage& source, const FeatureOptions& options) {
  const GrayImage img = options.resize
                            ? resize_nearest(source, options.resize->first, options.resize->second)
                            : source;
  return extract_features(img, options.variant,
                          make_region_grid(img, options.grid_rows, options.grid_cols),
                          options.reduce_to);
}

inline FeatureTable extract_table(const DatasetManifest& manifest, const FeatureOptions& options) {
  FeatureTable table{layout_of(options), {}, {}};
  table.labels.reserve(manifest.entries.size());
  table.rows.reserve(manifest.entries.size());
  for (const auto& entry : manifest.entries) {
    try {
      table.rows.push_back(image_features(load_image(entry.path), options).values);
    } catch (const Error& e) {
      throw Error(entry.path.string() + ": " + e.what());
    }
    table.labels.push_back(entry.label);
  }
  return table;
}

// ---------------------------------------------------------------------------
// Feature CSV: "# symlbp-features variant=V grid=RxC bins=B" then "label,v0,v1,..."

inline void write_feature_csv(std::ostream& out, const FeatureTable& table) {
  out << "# symlbp-features variant=" << to_string(table.layout.variant)
      << " grid=" << table.layout.grid_rows << 'x' << table.layout.grid_cols
      << " bins=" << table.layout.bins << '\n';
  char buf[32];
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    out << table.labels[r];
    for (double v : table.rows[r]) {
      std::snprintf(buf, sizeof buf, ",%.17g", v);
      out << buf;
    }
    out << '\n';
  }
}

inline FeatureTable read_feature_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("# symlbp-features", 0) != 0) {
    throw FormatError("missing feature CSV header");
  }
  FeatureTable table;
  std::istringstream header(line.substr(17));
  std::string field;
  bool have_variant = false;
  bool have_grid = false;
  bool have_bins = false;
  while (header >> field) {
    const auto eq = field.find('=');
    if (eq == std::string::npos) throw FormatError("bad header field '" + field + "'");
    const std::string key = field.substr(0, eq);
    const std::string value = field.substr(eq + 1);
    if (key == "variant") {
      table.layout.variant = parse_variant(value);
      have_variant = true;
    } else if (key == "grid") {
      std::tie(table.layout.grid_rows, table.layout.grid_cols) = parse_grid(value);
      have_grid = true;
    } else if (key == "bins") {
      table.layout.bins = std::atoi(value.c_str());
      have_bins = table.layout.bins > 0;
    }
  }
  if (!have_variant || !have_grid || !have_bins) throw FormatError("incomplete feature header");

  const std::size_t dim = table.layout.dimension();
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos || comma == 0) {
      throw FormatError("line " + std::to_string(line_no) + ": expected label,values");
    }
    std::vector<double> row;
    row.reserve(dim);
    const char* p = line.c_str() + comma;
    while (*p == ',') {
      char* end = nullptr;
      row.push_back(std::strtod(p + 1, &end));
      if (end == p + 1) throw FormatError("line " + std::to_string(line_no) + ": bad number");
      p = end;
    }
    if (*p != '\0') throw FormatError("line " + std::to_string(line_no) + ": trailing data");
    if (row.size() != dim) {
      throw DimensionMismatchError("line " + std::to_string(line_no) + ": " +
                                   std::to_string(row.size()) + " values, header implies " +
                                   std::to_string(dim));
    }
    table.labels.push_back(line.substr(0, comma));
    table.rows.push_back(std::move(row));
  }
  return table;
}

inline void save_feature_csv(const FeatureTable& table, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing " + path.string());
  write_feature_csv(out, table);
  if (!out) throw IoError("write failed: " + path.string());
}

inline FeatureTable load_feature_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return read_feature_csv(in);
}

// ---------------------------------------------------------------------------
// Reports

/// Confusion matrix is indexed [true class][predicted class]. Accuracies are
/// percentages; a class absent from the evaluated set has no accuracy.
struct ExperimentReport {
  std::vector<std::string> classes;
  std::vector<std::vector<std::size_t>> confusion;
  std::vector<std::optional<double>> per_class_accuracy;
  double total_accuracy = 0.0;
  std::size_t evaluated = 0;
  nlohmann::json metadata = nlohmann::json::object();
};

inline ExperimentReport make_report(std::vector<std::string> classes,
                                    std::span<const std::size_t> truth,
                                    std::span<const std::size_t> predicted,
                                    nlohmann::json metadata = nlohmann::json::object()) {
  const std::size_t k = classes.size();
  ExperimentReport r{std::move(classes), std::vector<std::vector<std::size_t>>(k, std::vector<std::size_t>(k)),
                     {}, 0.0, truth.size(), std::move(metadata)};
  for (std::size_t i = 0; i < truth.size(); ++i) ++r.confusion[truth[i]][predicted[i]];
  std::size_t trace = 0;
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t row = 0;
    for (std::size_t v : r.confusion[c]) row += v;
    trace += r.confusion[c][c];
    r.per_class_accuracy.push_back(
        row ? std::optional<double>(100.0 * static_cast<double>(r.confusion[c][c]) /
                                    static_cast<double>(row))
            : std::nullopt);
  }
  r.total_accuracy =
      truth.empty() ? 0.0 : 100.0 * static_cast<double>(trace) / static_cast<double>(truth.size());
  return r;
}

inline nlohmann::json to_json(const ExperimentReport& r) {
  nlohmann::json per_class = nlohmann::json::array();
  for (std::size_t c = 0; c < r.classes.size(); ++c) {
    const auto& acc = r.per_class_accuracy[c];
    per_class.push_back({{"class", r.classes[c]},
                         {"accuracy", acc ? nlohmann::json(*acc) : nlohmann::json(nullptr)}});
  }
  return {{"classes", r.classes},
          {"per_class", std::move(per_class)},
          {"total_accuracy", r.total_accuracy},
          {"evaluated", r.evaluated},
          {"confusion", r.confusion},
          {"metadata", r.metadata}};
}

/// Text table: one row per class, then "total".
inline std::string format_report_table(const ExperimentReport& r) {
  std::size_t width = 5;
  for (const auto& c : r.classes) width = std::max(width, c.size());
  std::ostringstream out;
  char buf[64];
  const auto row = [&](const std::string& name, std::optional<double> acc) {
    out << name << std::string(width - name.size() + 2, ' ');
    if (acc) {
      std::snprintf(buf, sizeof buf, "%6.2f", *acc);
      out << buf;
    } else {
      out << "    NA";
    }
    out << '\n';
  };
  out << "class" << std::string(width - 3, ' ') << "accuracy(%)\n";
  for (std::size_t c = 0; c < r.classes.size(); ++c) row(r.classes[c], r.per_class_accuracy[c]);
  row("total", r.total_accuracy);
  return out.str();
}

inline void save_json(const nlohmann::json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

inline nlohmann::json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

/// A trained classifier together with the feature space it expects.
struct TrainedModel {
  FeatureLayout layout;
  MulticlassModel classifier;
};

inline nlohmann::json to_json(const TrainedModel& m) {
  nlohmann::json j = to_json(m.classifier);
  j["features"] = to_json(m.layout);
  return j;
}

inline TrainedModel trained_model_from_json(const nlohmann::json& j) {
  try {
    return {feature_layout_from_json(j.at("features")), multiclass_model_from_json(j)};
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed model JSON: ") + e.what());
  }
}

inline nlohmann::json svm_metadata(const SvmConfig& config) {
  nlohmann::json j{{"kernel", to_string(config.kernel)}, {"c", config.c}, {"seed", config.seed}};
  if (config.kernel == KernelType::rbf) {
    j["gamma"] = config.gamma;
    j["tolerance"] = config.tolerance;
    j["max_passes"] = config.max_passes;
  } else {
    j["epochs"] = config.epochs;
  }
  return j;
}

/// Scores `model` on the selected rows of `table`.
inline ExperimentReport evaluate(const TrainedModel& model, const FeatureTable& table,
                                 std::span<const std::size_t> rows,
                                 nlohmann::json metadata = nlohmann::json::object()) {
  if (!(model.layout == table.layout)) {
    throw DimensionMismatchError("feature layout of the table does not match the model");
  }
  const auto labels = table.label_indices(model.classifier.classes);
  std::vector<std::size_t> truth;
  std::vector<std::size_t> predicted;
  truth.reserve(rows.size());
  predicted.reserve(rows.size());
  for (std::size_t r : rows) {
    truth.push_back(labels[r]);
    predicted.push_back(model.classifier.predict(table.rows[r]).label);
  }
  metadata["features"] = to_json(model.layout);
  return make_report(model.classifier.classes, truth, predicted, std::move(metadata));
}

inline ExperimentReport evaluate(const TrainedModel& model, const FeatureTable& table,
                                 nlohmann::json metadata = nlohmann::json::object()) {
  std::vector<std::size_t> rows(table.rows.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return evaluate(model, table, rows, std::move(metadata));
}

struct TrainResult {
  TrainedModel model;
  ExperimentReport report;
  SplitIndices split;
};

namespace detail {

template <typename Fn>
auto in_stage(const char* stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(stage, e.what());
  }
}

}  // namespace detail

/// Split, train on the training side, report on the held-out side.
inline TrainResult train_and_evaluate(const FeatureTable& table, const SvmConfig& svm,
                                      const SplitSpec& split_spec) {
  const auto classes = table.classes();
  if (classes.size() < 2) {
    throw StageError("train", "need at least two classes, found " + std::to_string(classes.size()));
  }
  const auto labels = table.label_indices(classes);
  SplitIndices split =
      detail::in_stage("split", [&] { return split_indices(labels, split_spec); });

  TrainedModel model = detail::in_stage("train", [&] {
    std::vector<std::vector<double>> x;
    std::vector<std::size_t> y;
    x.reserve(split.train.size());
    y.reserve(split.train.size());
    for (std::size_t i : split.train) {
      x.push_back(table.rows[i]);
      y.push_back(labels[i]);
    }
    return TrainedModel{table.layout, train_multiclass(x, y, classes, svm)};
  });

  bool converged = true;
  for (const auto& m : model.classifier.models) converged = converged && m.converged;
  nlohmann::json metadata{{"svm", svm_metadata(svm)},
                          {"split",
                           {{"train_fraction", split_spec.train_fraction},
                            {"seed", split_spec.seed},
                            {"stratified", split_spec.stratified},
                            {"train_count", split.train.size()},
                            {"test_count", split.test.size()}}},
                          {"converged", converged}};
  ExperimentReport report = detail::in_stage(
      "evaluate", [&] { return evaluate(model, table, split.test, std::move(metadata)); });
  return {std::move(model), std::move(report), std::move(split)};
}

/// Features for every image, then split, train and evaluate.
inline ExperimentReport run_experiment(const DatasetManifest& manifest,
                                       const FeatureOptions& features, const SvmConfig& svm,
                                       const SplitSpec& split_spec) {
  const FeatureTable table =
      detail::in_stage("features", [&] { return extract_table(manifest, features); });
  return train_and_evaluate(table, svm, split_spec).report;
}

}  // namespace symlbp
