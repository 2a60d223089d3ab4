// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "symlbp.hpp"

namespace {

using namespace symlbp;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(const char* id, const char* title, const Outcome& o) {
  std::printf("[%s] %s %s: %s\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str());
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

void warn(const char* id, const std::string& message) {
  std::printf("[WARN] %s %s\n", id, message.c_str());
}

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

Outcome guarded(const std::function<Outcome()>& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    return {false, std::string("exception: ") + e.what()};
  }
}

int oracle_code(const GrayImage& img, int x, int y, LbpVariant v) {
  switch (v) {
    case LbpVariant::standard:
      return oracle::standard_lbp(img, x, y);
    case LbpVariant::symmetric8:
      return oracle::symmetric8_lbp(img, x, y);
    case LbpVariant::symmetric4:
      return oracle::symmetric4_lbp(img, x, y);
  }
  return -1;
}

Outcome ac1_antisymmetry_and_complement() {
  const auto start = Clock::now();
  std::size_t pixels = 0;
  for (std::uint32_t seed = 0; seed < 1000; ++seed) {
    const GrayImage img = oracle::random_image(16, 16, seed);
    const HardlimPlanes planes = hardlim_planes(img, DifferenceScheme::symmetric);
    for (int y = 1; y < 15; ++y) {
      for (int x = 1; x < 15; ++x, ++pixels) {
        const auto d = directional_derivatives(img, x, y, DifferenceScheme::symmetric);
        for (int i = 0; i < 4; ++i) {
          const double di = d[static_cast<std::size_t>(i)];
          const double dj = d[static_cast<std::size_t>(i + 4)];
          if (di != -dj) {
            return {false, fmt("d%d != -d%d at seed %u (%d,%d)", i + 1, i + 5, seed, x, y)};
          }
          if (di != oracle::central(img, x, y, i)) {
            return {false, fmt("d%d differs from oracle at seed %u", i + 1, seed)};
          }
          const int sum = planes.at(i, x - 1, y - 1) + planes.at(i + 4, x - 1, y - 1);
          if (sum != (di == 0.0 ? 2 : 1)) {
            return {false, fmt("H(d%d)+H(d%d)=%d at seed %u (%d,%d)", i + 1, i + 5, sum, seed, x, y)};
          }
        }
      }
    }
  }
  const double elapsed = seconds_since(start);
  return {elapsed < 5.0, fmt("1000 images, %zu pixels, %.3f s (limit 5 s)", pixels, elapsed)};
}

Outcome ac2_bit_consistency() {
  std::size_t checked = 0;
  for (std::uint32_t seed = 0; seed < 200; ++seed) {
    // narrow range exercises ties
    const GrayImage img = seed % 2 ? oracle::random_image(24, 24, seed)
                                   : oracle::random_image(24, 24, seed, 50, 53);
    const LbpCodeMap m8 = compute_code_map(img, LbpVariant::symmetric8);
    const LbpCodeMap m4 = compute_code_map(img, LbpVariant::symmetric4);
    for (int y = 0; y < m8.height(); ++y) {
      for (int x = 0; x < m8.width(); ++x, ++checked) {
        const int c8 = m8.at(x, y);
        const int c4 = m4.at(x, y);
        if ((c8 >> 4) != c4) return {false, fmt("high nibble %d != sym4 %d", c8 >> 4, c4)};
        for (int i = 0; i < 4; ++i) {
          const int lo = (c8 >> i) & 1;
          const int hi = (c8 >> (i + 4)) & 1;
          const bool tie = oracle::central(img, x + 1, y + 1, i) == 0.0;
          if (tie ? (lo != 1 || hi != 1) : lo + hi != 1) {
            return {false, fmt("bits %d/%d inconsistent at seed %u", i, i + 4, seed)};
          }
        }
      }
    }
  }
  return {true, fmt("%zu codes: sym4 is the sym8 high nibble, paired bits complementary off ties", checked)};
}

Outcome ac3_oracle_equivalence() {
  std::size_t checked = 0;
  for (std::uint32_t seed = 0; seed < 100; ++seed) {
    const GrayImage img = oracle::random_image(32, 32, 5000 + seed, seed % 3 ? 0 : 120, seed % 3 ? 255 : 124);
    for (LbpVariant v : {LbpVariant::standard, LbpVariant::symmetric8, LbpVariant::symmetric4}) {
      const LbpCodeMap map = compute_code_map(img, v);
      for (int y = 1; y < 31; ++y) {
        for (int x = 1; x < 31; ++x, ++checked) {
          const int expected = oracle_code(img, x, y, v);
          if (map.at(x - 1, y - 1) != expected || code_at(img, x, y, v) != expected) {
            return {false, fmt("%s mismatch at seed %u (%d,%d)", std::string(to_string(v)).c_str(), seed, x, y)};
          }
        }
      }
    }
  }
  return {true, fmt("100 images, %zu codes match the scalar oracle", checked)};
}

Outcome ac4_dimensions() {
  const GrayImage img = oracle::random_image(64, 64, 4);
  const struct {
    LbpVariant v;
    std::size_t bins;
  } cases[] = {{LbpVariant::standard, 256}, {LbpVariant::symmetric8, 256}, {LbpVariant::symmetric4, 16}};
  for (const auto& c : cases) {
    if (static_cast<std::size_t>(code_count(c.v)) != c.bins) {
      return {false, std::string(to_string(c.v)) + " bin count"};
    }
    if (histogram(compute_code_map(img, c.v)).size() != c.bins) {
      return {false, std::string(to_string(c.v)) + " histogram size"};
    }
    for (auto [rows, cols] : {std::pair{1, 1}, std::pair{4, 4}, std::pair{3, 5}}) {
      const auto fv = extract_features(img, c.v, make_region_grid(img, rows, cols));
      if (fv.values.size() != static_cast<std::size_t>(rows * cols) * c.bins) {
        return {false, fmt("%s %dx%d length %zu", std::string(to_string(c.v)).c_str(), rows, cols, fv.values.size())};
      }
    }
  }
  const auto reduced = extract_features(img, LbpVariant::standard, make_region_grid(img, 4, 4), 16);
  if (reduced.values.size() != 256) return {false, "st reduced to 16 has wrong length"};
  return {true, "bins st=256 sym8=256 sym4=16; length = regions x bins"};
}

// Smooth-noise stand-in for a face crop: coarse random lattice, bilinear upsampling.
GrayImage face_proxy(std::uint32_t seed) {
  constexpr int kSide = 64;
  constexpr int kCoarse = 9;
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> level(20.0, 235.0);
  std::vector<double> lattice(kCoarse * kCoarse);
  for (auto& v : lattice) v = level(rng);
  std::vector<std::uint8_t> px(kSide * kSide);
  const double scale = static_cast<double>(kCoarse - 1) / (kSide - 1);
  for (int y = 0; y < kSide; ++y) {
    for (int x = 0; x < kSide; ++x) {
      const double fx = x * scale;
      const double fy = y * scale;
      const int x0 = std::min(static_cast<int>(fx), kCoarse - 2);
      const int y0 = std::min(static_cast<int>(fy), kCoarse - 2);
      const double tx = fx - x0;
      const double ty = fy - y0;
      const auto at = [&](int cx, int cy) { return lattice[static_cast<std::size_t>(cy * kCoarse + cx)]; };
      const double v = (1 - ty) * ((1 - tx) * at(x0, y0) + tx * at(x0 + 1, y0)) +
                       ty * ((1 - tx) * at(x0, y0 + 1) + tx * at(x0 + 1, y0 + 1));
      px[static_cast<std::size_t>(y * kSide + x)] = static_cast<std::uint8_t>(std::lround(v));
    }
  }
  return GrayImage(kSide, kSide, std::move(px));
}

Outcome ac5_correlation() {
  // every pixel distinct, so no symmetric difference is zero
  std::vector<std::uint8_t> px(256);
  std::iota(px.begin(), px.end(), 0);
  std::shuffle(px.begin(), px.end(), std::mt19937(55));
  const GrayImage distinct(16, 16, px);
  const CorrelationMatrix exact = correlation_matrix(hardlim_planes(distinct, DifferenceScheme::symmetric));
  std::string values;
  for (int i = 0; i < 4; ++i) {
    const auto r = exact.at(i, i + 4);
    if (!r || std::abs(*r + 1.0) > 1e-12) {
      return {false, fmt("distinct image r(%d,%d)=%s", i + 1, i + 5, r ? std::to_string(*r).c_str() : "NA")};
    }
  }

  const CorrelationMatrix face = correlation_matrix(hardlim_planes(face_proxy(2024), DifferenceScheme::symmetric));
  for (int i = 0; i < 4; ++i) {
    const auto r = face.at(i, i + 4);
    values += fmt(" r(%d,%d)=%s", i + 1, i + 5, r ? fmt("%.4f", *r).c_str() : "NA");
    if (!r || *r < -1.0 - 1e-12 || *r > -0.8) {
      warn("AC5", fmt("face proxy r(%d,%d) outside [-1, -0.8]", i + 1, i + 5));
    } else if (*r > -0.9) {
      warn("AC5", fmt("face proxy r(%d,%d)=%.4f above -0.9", i + 1, i + 5, *r));
    }
  }
  return {true, "distinct image r(i,i+4) = -1 within 1e-12; face proxy" + values};
}

Outcome ac6_svm() {
  // (a) two-point closed forms
  const std::vector<std::vector<double>> two{{1.0}, {-1.0}};
  const std::vector<int> two_y{1, -1};
  SvmConfig rbf;
  rbf.kernel = KernelType::rbf;
  rbf.gamma = 0.1;
  rbf.c = 100.0;
  const SvmModel m = train_smo(two, two_y, rbf);
  const double alpha = 1.0 / (1.0 - std::exp(-0.1 * 4.0));
  if (std::abs(m.coefficients[0] - alpha) > 1e-6 || std::abs(m.coefficients[1] + alpha) > 1e-6 ||
      std::abs(m.bias) > 1e-6) {
    return {false, fmt("rbf two-point alpha %.9f expected %.9f", m.coefficients[0], alpha)};
  }
  SvmConfig lin;
  lin.kernel = KernelType::linear;
  const SvmModel ml = train_smo(two, two_y, lin);
  if (std::abs(ml.weights[0] - 1.0) > 1e-6 || std::abs(ml.bias) > 1e-6) {
    return {false, fmt("linear two-point w=%.9f b=%.9f", ml.weights[0], ml.bias)};
  }

  // (b) XOR
  const std::vector<std::vector<double>> xor_x{{0, 0}, {1, 1}, {0, 1}, {1, 0}};
  const std::vector<int> xor_y{-1, -1, 1, 1};
  const auto accuracy = [&](const SvmModel& model) {
    int hits = 0;
    for (std::size_t i = 0; i < xor_x.size(); ++i) hits += model.predict(xor_x[i]) == xor_y[i];
    return hits * 25;
  };
  SvmConfig xr;
  xr.kernel = KernelType::rbf;
  xr.gamma = 1.0;
  xr.c = 10.0;
  const int rbf_acc = accuracy(train_smo(xor_x, xor_y, xr));
  xr.kernel = KernelType::linear;
  const int smo_lin_acc = accuracy(train_smo(xor_x, xor_y, xr));
  const int peg_acc = accuracy(train_linear(xor_x, xor_y, xr));
  if (rbf_acc != 100 || smo_lin_acc == 100 || peg_acc == 100) {
    return {false, fmt("xor rbf %d%% linear smo %d%% pegasos %d%%", rbf_acc, smo_lin_acc, peg_acc)};
  }

  // (c) invariants along the optimization path
  std::mt19937 rng(77);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<std::vector<double>> x;
  std::vector<int> y;
  for (int k = 0; k < 200; ++k) {
    const int label = k % 2 ? 1 : -1;
    x.push_back({0.5 * label + noise(rng), 0.5 * label + noise(rng)});
    y.push_back(label);
  }
  SvmConfig cfg;
  cfg.kernel = KernelType::rbf;
  cfg.gamma = 0.5;
  cfg.c = 1.0;
  std::size_t steps = 0;
  double last = -1e300;
  std::string broken;
  train_smo(x, y, cfg, [&](const SmoStep& s) {
    ++steps;
    if (!broken.empty()) return;
    double balance = 0.0;
    for (std::size_t k = 0; k < s.alphas.size(); ++k) {
      if (s.alphas[k] < 0.0 || s.alphas[k] > s.c) broken = fmt("alpha out of box at step %zu", steps);
      balance += s.alphas[k] * s.labels[k];
    }
    if (std::abs(balance) > 1e-9) broken = fmt("sum alpha*y = %g at step %zu", balance, steps);
    if (s.objective < last - 1e-9 * std::max(1.0, std::abs(last))) {
      broken = fmt("objective fell %.12g -> %.12g at step %zu", last, s.objective, steps);
    }
    last = s.objective;
  });
  if (!broken.empty()) return {false, broken};
  if (steps == 0) return {false, "observer never called"};
  return {true, fmt("closed forms within 1e-6; xor rbf %d%%, linear %d%%/%d%%; %zu feasible monotone steps",
                    rbf_acc, smo_lin_acc, peg_acc, steps)};
}

struct CorpusRun {
  ExperimentReport st;
  ExperimentReport sym4;
  double seconds = 0.0;
};

SyntheticSpec corpus_spec() {
  SyntheticSpec spec;
  spec.recipes = {TextureRecipe::vertical_stripes, TextureRecipe::horizontal_stripes,
                  TextureRecipe::checkerboard};
  spec.width = 64;
  spec.height = 64;
  spec.noise = 20;
  spec.count = 200;
  return spec;
}

CorpusRun run_corpus(const fs::path& dir) {
  const auto start = Clock::now();
  fs::remove_all(dir);
  const DatasetManifest manifest = generate_synthetic(corpus_spec(), dir);
  const SvmConfig svm;  // linear
  const SplitSpec split;
  FeatureOptions st;
  st.variant = LbpVariant::standard;
  st.reduce_to = 16;
  FeatureOptions sym4;
  sym4.variant = LbpVariant::symmetric4;
  CorpusRun run;
  run.st = run_experiment(manifest, st, svm, split);
  run.sym4 = run_experiment(manifest, sym4, svm, split);
  run.seconds = seconds_since(start);
  return run;
}

Outcome ac7_corpus(const CorpusRun& run) {
  const double a_st = run.st.total_accuracy;
  const double a_s4 = run.sym4.total_accuracy;
  const double gap = std::abs(a_st - a_s4);
  const bool pass = a_st >= 95.0 && a_s4 >= 95.0 && gap <= 3.0 && run.seconds < 120.0;
  return {pass, fmt("StLBP/16 %.2f%%, SyLBP4 %.2f%%, gap %.2f pp, %zu test images, %.2f s", a_st, a_s4,
                    gap, run.sym4.evaluated, run.seconds)};
}

Outcome ac8_reproducible(const CorpusRun& first, const fs::path& dir) {
  const CorpusRun second = run_corpus(dir);
  const std::string a = to_json(first.st).dump(2) + to_json(first.sym4).dump(2) +
                        format_report_table(first.st) + format_report_table(first.sym4);
  const std::string b = to_json(second.st).dump(2) + to_json(second.sym4).dump(2) +
                        format_report_table(second.st) + format_report_table(second.sym4);
  return {a == b, fmt("rerun report %s (%zu bytes)", a == b ? "identical" : "differs", a.size())};
}

Outcome ac9_speed() {
  SyntheticSpec spec = corpus_spec();
  spec.recipes.push_back(TextureRecipe::flat_noise);
  spec.count = 250;
  std::vector<GrayImage> images;
  for (auto& cls : synthesize(spec)) {
    for (auto& img : cls) images.push_back(std::move(img));
  }
  const RegionGrid grid = make_region_grid(64, 64, 4, 4);
  double sink = 0.0;
  const auto time_variant = [&](LbpVariant v) {
    double best = 1e300;
    for (int rep = 0; rep < 5; ++rep) {
      const auto start = Clock::now();
      for (const GrayImage& img : images) sink += extract_features(img, v, grid).values[0];
      best = std::min(best, seconds_since(start));
    }
    return best;
  };
  const double t4 = time_variant(LbpVariant::symmetric4);
  const double t8 = time_variant(LbpVariant::symmetric8);
  const bool pass = t4 < 10.0 && t4 <= t8;
  return {pass, fmt("%zu images: sym4 %.4f s, sym8 %.4f s (best of 5)%s", images.size(), t4, t8,
                    sink < 0 ? " " : "")};
}

}  // namespace

int main(int argc, char** argv) {
  fs::path workdir = fs::temp_directory_path() / "symlbp_acceptance";
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--workdir") workdir = argv[i + 1];
  }
  fs::create_directories(workdir);

  report("AC1", "antisymmetry and complement", guarded(ac1_antisymmetry_and_complement));
  report("AC2", "bit consistency sym4/sym8", guarded(ac2_bit_consistency));
  report("AC3", "oracle equivalence", guarded(ac3_oracle_equivalence));
  report("AC4", "feature dimensions", guarded(ac4_dimensions));
  report("AC5", "hardlim pair correlation", guarded(ac5_correlation));
  report("AC6", "svm correctness", guarded(ac6_svm));

  CorpusRun first;
  bool have_first = false;
  report("AC7", "synthetic texture accuracy", guarded([&] {
           first = run_corpus(workdir / "corpus_a");
           have_first = true;
           return ac7_corpus(first);
         }));
  report("AC8", "reproducibility", guarded([&] {
           if (!have_first) return Outcome{false, "first run unavailable"};
           return ac8_reproducible(first, workdir / "corpus_b");
         }));
  report("AC9", "extraction speed", guarded(ac9_speed));

  std::printf("%s: %d failing criteria\n", failures ? "FAILED" : "OK", failures);
  return failures ? 1 : 0;
}
