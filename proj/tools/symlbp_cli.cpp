// symlbp: LBP feature extraction, correlation analysis and SVM experiments.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "symlbp.hpp"

namespace {

using namespace symlbp;

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing " + path);
  return out;
}

std::optional<int> optional_reduce(int reduce) {
  return reduce > 0 ? std::optional<int>(reduce) : std::nullopt;
}

std::optional<std::pair<int, int>> optional_size(const std::string& text) {
  if (text.empty()) return std::nullopt;
  // WxH, reusing the RxC grid parser
  const auto [w, h] = parse_grid(text);
  return std::make_pair(w, h);
}

void print_report(const ExperimentReport& report) {
  std::cout << format_report_table(report);
}

struct ExtractArgs {
  std::string input, variant = "sym4", grid = "4x4", resize, out;
  int reduce = 0;
};

void run_extract(const ExtractArgs& a) {
  FeatureOptions options;
  options.variant = parse_variant(a.variant);
  std::tie(options.grid_rows, options.grid_cols) = parse_grid(a.grid);
  options.reduce_to = optional_reduce(a.reduce);
  options.resize = optional_size(a.resize);
  layout_of(options);

  const DatasetManifest manifest = detail::in_stage("ingest", [&] { return ingest(a.input); });
  for (const auto& path : manifest.skipped) {
    std::cerr << "skipped undecodable file: " << path.string() << '\n';
  }
  const FeatureTable table =
      detail::in_stage("extract", [&] { return extract_table(manifest, options); });
  detail::in_stage("write", [&] { save_feature_csv(table, a.out); });
  std::cout << "wrote " << table.rows.size() << " rows x " << table.layout.dimension()
            << " features (" << manifest.labels().size() << " classes) to " << a.out << '\n';
}

struct TrainArgs {
  std::string features, kernel = "linear", model, report;
  double gamma = 100.0, c = 10.0, train_frac = 0.7, tolerance = 1e-3;
  std::uint64_t seed = 0;
  int epochs = 50, max_passes = 100;
};

void run_train(const TrainArgs& a) {
  SvmConfig svm;
  svm.kernel = parse_kernel(a.kernel);
  svm.gamma = a.gamma;
  svm.c = a.c;
  svm.seed = a.seed;
  svm.epochs = a.epochs;
  svm.max_passes = a.max_passes;
  svm.tolerance = a.tolerance;
  svm.validate();
  SplitSpec split{a.train_frac, a.seed, true};

  const FeatureTable table =
      detail::in_stage("load", [&] { return load_feature_csv(a.features); });
  const TrainResult result = train_and_evaluate(table, svm, split);
  detail::in_stage("write", [&] {
    save_json(to_json(result.model), a.model);
    save_json(to_json(result.report), a.report);
  });
  for (const auto& m : result.model.classifier.models) {
    if (!m.converged) {
      std::cerr << "warning: SMO stopped at max passes before meeting the KKT tolerance\n";
      break;
    }
  }
  print_report(result.report);
}

struct EvalArgs {
  std::string model, features, report;
};

void run_eval(const EvalArgs& a) {
  const TrainedModel model =
      detail::in_stage("load", [&] { return trained_model_from_json(load_json(a.model)); });
  const FeatureTable table =
      detail::in_stage("load", [&] { return load_feature_csv(a.features); });
  const ExperimentReport report = detail::in_stage("evaluate", [&] { return evaluate(model, table); });
  detail::in_stage("write", [&] { save_json(to_json(report), a.report); });
  print_report(report);
}

struct CorrArgs {
  std::string image, scheme = "symmetric", out;
};

void run_corr(const CorrArgs& a) {
  const DifferenceScheme scheme = parse_scheme(a.scheme);
  const GrayImage img = detail::in_stage("load", [&] { return load_image(a.image); });
  const CorrelationMatrix m = correlation_matrix(hardlim_planes(img, scheme));
  auto out = open_output(a.out);
  write_correlation_csv(out, m);
  for (int i = 0; i < 4; ++i) {
    const auto r = m.at(i, i + 4);
    std::printf("corr(H(d%d), H(d%d)) = %s\n", i + 1, i + 5,
                r ? std::to_string(*r).c_str() : "NA");
  }
}

struct HistArgs {
  std::string image, variant = "sym4", out;
  int reduce = 0;
};

void run_hist(const HistArgs& a) {
  const LbpVariant variant = parse_variant(a.variant);
  const int bins = feature_bins(variant, optional_reduce(a.reduce));
  const GrayImage img = detail::in_stage("load", [&] { return load_image(a.image); });
  Histogram h = histogram(compute_code_map(img, variant));
  if (static_cast<int>(h.size()) != bins) h = reduce_histogram(h, bins);
  auto out = open_output(a.out);
  out << "bin,count,fraction\n";
  for (std::size_t k = 0; k < h.size(); ++k) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%zu,%llu,%.17g\n", k,
                  static_cast<unsigned long long>(h.bins[k]),
                  static_cast<double>(h.bins[k]) / static_cast<double>(h.total));
    out << buf;
  }
}

struct CodesArgs {
  std::string image, variant = "sym4", out;
};

void run_codes(const CodesArgs& a) {
  const GrayImage img = detail::in_stage("load", [&] { return load_image(a.image); });
  auto out = open_output(a.out);
  write_code_map_csv(out, compute_code_map(img, parse_variant(a.variant)));
}

struct SynthArgs {
  std::string spec, out;
};

void run_synth(const SynthArgs& a) {
  const SyntheticSpec spec =
      detail::in_stage("spec", [&] { return synthetic_spec_from_json(load_json(a.spec)); });
  const DatasetManifest manifest =
      detail::in_stage("synth", [&] { return generate_synthetic(spec, a.out); });
  std::cout << "wrote " << manifest.entries.size() << " images in " << spec.recipes.size()
            << " classes to " << a.out << '\n';
}

struct BenchArgs {
  std::string input, variant = "all", grid = "4x4";
  int repeat = 5;
};

void run_bench(const BenchArgs& a) {
  if (a.repeat < 1) throw ArgumentError("--repeat must be >= 1");
  std::vector<LbpVariant> variants;
  if (a.variant == "all") {
    variants = {LbpVariant::standard, LbpVariant::symmetric8, LbpVariant::symmetric4};
  } else {
    variants = {parse_variant(a.variant)};
  }
  const auto [rows, cols] = parse_grid(a.grid);
  const DatasetManifest manifest = detail::in_stage("ingest", [&] { return ingest(a.input); });
  std::vector<GrayImage> images;
  images.reserve(manifest.entries.size());
  for (const auto& e : manifest.entries) images.push_back(load_image(e.path));

  std::printf("%-8s %8s %8s %12s %14s %12s\n", "variant", "images", "repeat", "best_s",
              "images_per_s", "Mpx_per_s");
  double pixels = 0.0;
  for (const auto& img : images) pixels += static_cast<double>(img.width()) * img.height();
  for (LbpVariant v : variants) {
    double best = 1e300;
    double checksum = 0.0;
    for (int r = 0; r < a.repeat; ++r) {
      const auto start = std::chrono::steady_clock::now();
      for (const auto& img : images) {
        const auto fv = extract_features(img, v, make_region_grid(img, rows, cols));
        checksum += fv.values.front();
      }
      const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
      best = std::min(best, elapsed.count());
    }
    std::printf("%-8s %8zu %8d %12.6f %14.1f %12.2f\n", std::string(to_string(v)).c_str(),
                images.size(), a.repeat, best, static_cast<double>(images.size()) / best,
                pixels / best / 1e6);
    if (checksum < 0) std::puts("");  // keeps the extraction observable
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local binary pattern descriptors (standard, symmetric 8-bit, symmetric 4-bit) "
               "with region histograms and SVM classification"};
  app.require_subcommand(1);
  const std::vector<std::string> variant_names{"st", "sym8", "sym4"};

  ExtractArgs extract;
  auto* ex = app.add_subcommand("extract", "Extract feature vectors from a class-per-directory corpus");
  ex->add_option("--input", extract.input, "Corpus root (one subdirectory per class)")->required();
  ex->add_option("--variant", extract.variant, "st|sym8|sym4")->required()
      ->check(CLI::IsMember(variant_names));
  ex->add_option("--grid", extract.grid, "Region grid RxC")->required();
  ex->add_option("--reduce", extract.reduce, "Reduce each region histogram to N bins");
  ex->add_option("--resize", extract.resize, "Resize images to WxH before coding");
  ex->add_option("--out", extract.out, "Output CSV")->required();

  TrainArgs train;
  auto* tr = app.add_subcommand("train", "Split features, train an SVM, report held-out accuracy");
  tr->add_option("--features", train.features, "Feature CSV")->required();
  tr->add_option("--kernel", train.kernel, "linear|rbf")->check(CLI::IsMember({"linear", "rbf"}));
  tr->add_option("--gamma", train.gamma, "RBF kernel width")->capture_default_str();
  tr->add_option("--c", train.c, "Regularization parameter C")->capture_default_str();
  tr->add_option("--seed", train.seed, "Seed for split and training")->capture_default_str();
  tr->add_option("--train-frac", train.train_frac, "Training fraction")->capture_default_str();
  tr->add_option("--epochs", train.epochs, "Pegasos epochs (linear)")->capture_default_str();
  tr->add_option("--max-passes", train.max_passes, "SMO pass limit (rbf)")->capture_default_str();
  tr->add_option("--tolerance", train.tolerance, "SMO KKT tolerance (rbf)")->capture_default_str();
  tr->add_option("--model", train.model, "Output model JSON")->required();
  tr->add_option("--report", train.report, "Output report JSON")->required();

  EvalArgs eval;
  auto* ev = app.add_subcommand("eval", "Evaluate a trained model on a feature CSV");
  ev->add_option("--model", eval.model, "Model JSON")->required();
  ev->add_option("--features", eval.features, "Feature CSV")->required();
  ev->add_option("--report", eval.report, "Output report JSON")->required();

  CorrArgs corr;
  auto* co = app.add_subcommand("corr", "Correlation matrix of the eight Hardlim planes of an image");
  co->add_option("--image", corr.image, "Input image (P5 PGM or 8-bit gray PNG)")->required();
  co->add_option("--scheme", corr.scheme, "onesided|symmetric")->required()
      ->check(CLI::IsMember({"onesided", "symmetric"}));
  co->add_option("--out", corr.out, "Output CSV (8x8, NA where undefined)")->required();

  HistArgs hist;
  auto* hi = app.add_subcommand("hist", "Whole-image code histogram");
  hi->add_option("--image", hist.image, "Input image")->required();
  hi->add_option("--variant", hist.variant, "st|sym8|sym4")->required()
      ->check(CLI::IsMember(variant_names));
  hi->add_option("--reduce", hist.reduce, "Reduce to N bins");
  hi->add_option("--out", hist.out, "Output CSV")->required();

  CodesArgs codes;
  auto* cm = app.add_subcommand("codes", "Per-pixel code map of an image as CSV");
  cm->add_option("--image", codes.image, "Input image")->required();
  cm->add_option("--variant", codes.variant, "st|sym8|sym4")->required()
      ->check(CLI::IsMember(variant_names));
  cm->add_option("--out", codes.out, "Output CSV")->required();

  SynthArgs synth;
  auto* sy = app.add_subcommand("synth", "Generate a synthetic texture corpus");
  sy->add_option("--spec", synth.spec, "Synthetic spec JSON")->required();
  sy->add_option("--out", synth.out, "Output directory")->required();

  BenchArgs bench;
  auto* be = app.add_subcommand("bench", "Feature extraction throughput");
  be->add_option("--input", bench.input, "Corpus root")->required();
  be->add_option("--variant", bench.variant, "st|sym8|sym4|all")->capture_default_str()
      ->check(CLI::IsMember({"st", "sym8", "sym4", "all"}));
  be->add_option("--grid", bench.grid, "Region grid RxC")->capture_default_str();
  be->add_option("--repeat", bench.repeat, "Timed passes (best is reported)")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    if (command == "extract") run_extract(extract);
    else if (command == "train") run_train(train);
    else if (command == "eval") run_eval(eval);
    else if (command == "corr") run_corr(corr);
    else if (command == "hist") run_hist(hist);
    else if (command == "codes") run_codes(codes);
    else if (command == "synth") run_synth(synth);
    else if (command == "bench") run_bench(bench);
  } catch (const StageError& e) {
    std::cerr << "symlbp " << command << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "symlbp " << command << ": [" << command << "] " << e.what() << '\n';
    return 1;
  }
  return 0;
}
