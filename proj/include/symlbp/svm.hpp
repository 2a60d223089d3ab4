#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "symlbp/error.hpp"

namespace symlbp {

enum class KernelType { linear, rbf };

constexpr std::string_view to_string(KernelType kernel) noexcept {
  return kernel == KernelType::linear ? "linear" : "rbf";
}

inline KernelType parse_kernel(std::string_view name) {
  if (name == "linear") return KernelType::linear;
  if (name == "rbf") return KernelType::rbf;
  throw ArgumentError("unknown kernel '" + std::string(name) + "' (linear|rbf)");
}

struct SvmConfig {
  KernelType kernel = KernelType::linear;
  double gamma = 100.0;      // RBF width
  double c = 10.0;           // regularization trade-off
  int epochs = 50;           // Pegasos
  int max_passes = 100;      // SMO full passes
  double tolerance = 1e-3;   // SMO KKT tolerance
  std::uint64_t seed = 0;

  void validate() const {
    if (!(gamma > 0.0)) throw ArgumentError("gamma must be positive");
    if (!(c > 0.0)) throw ArgumentError("C must be positive");
    if (!(tolerance > 0.0)) throw ArgumentError("tolerance must be positive");
    if (epochs < 1 || max_passes < 1) throw ArgumentError("epochs and max_passes must be >= 1");
  }
};

inline double dot(std::span<const double> a, std::span<const double> b) noexcept {
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) sum += a[k] * b[k];
  return sum;
}

/// exp(-gamma * |a - b|^2)
inline double rbf_kernel(std::span<const double> a, std::span<const double> b,
                         double gamma) noexcept {
  double dist2 = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double diff = a[k] - b[k];
    dist2 += diff * diff;
  }
  return std::exp(-gamma * dist2);
}

/// Binary SVM. Linear models keep an explicit weight vector; RBF models keep
/// their support vectors with coefficients alpha_i * y_i.
struct SvmModel {
  KernelType kernel = KernelType::linear;
  double gamma = 0.0;
  double c = 0.0;
  std::size_t dimension = 0;
  std::vector<double> weights;
  std::vector<std::vector<double>> support_vectors;
  std::vector<double> coefficients;
  double bias = 0.0;
  bool converged = true;
  int passes = 0;

  double decision_value(std::span<const double> x) const {
    if (x.size() != dimension) {
      throw DimensionMismatchError("model expects " + std::to_string(dimension) +
                                   " features, got " + std::to_string(x.size()));
    }
    if (kernel == KernelType::linear) return dot(weights, x) + bias;
    double sum = bias;
    for (std::size_t k = 0; k < support_vectors.size(); ++k) {
      sum += coefficients[k] * rbf_kernel(support_vectors[k], x, gamma);
    }
    return sum;
  }

  int predict(std::span<const double> x) const { return decision_value(x) >= 0.0 ? 1 : -1; }
};

namespace detail {

inline std::size_t validate_binary(std::span<const std::vector<double>> samples,
                                   std::span<const int> labels) {
  if (samples.size() != labels.size()) {
    throw DimensionMismatchError("sample and label counts differ");
  }
  if (samples.empty()) throw DegenerateDataError("no training samples");
  const std::size_t dim = samples.front().size();
  bool positive = false;
  bool negative = false;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].size() != dim) {
      throw DimensionMismatchError("sample " + std::to_string(i) + " has " +
                                   std::to_string(samples[i].size()) + " features, expected " +
                                   std::to_string(dim));
    }
    if (labels[i] == 1) {
      positive = true;
    } else if (labels[i] == -1) {
      negative = true;
    } else {
      throw ArgumentError("binary labels must be +1 or -1");
    }
  }
  if (!positive || !negative) throw DegenerateDataError("training data has a single class");
  return dim;
}

// Uniform index in [0, bound) straight from the engine, so the draw sequence
// does not depend on the standard library's distribution implementation.
inline std::size_t draw_index(std::mt19937_64& rng, std::size_t bound) {
  return static_cast<std::size_t>(rng() % bound);
}

}  // namespace detail

/// Pegasos: stochastic subgradient descent on the primal hinge loss with
/// lambda = 1 / (C n). The bias is handled as a constant unit feature.
inline SvmModel train_linear(std::span<const std::vector<double>> samples,
                             std::span<const int> labels, const SvmConfig& config) {
  config.validate();
  const std::size_t dim = detail::validate_binary(samples, labels);
  const std::size_t n = samples.size();
  const double lambda = 1.0 / (config.c * static_cast<double>(n));
  const double radius = 1.0 / std::sqrt(lambda);

  std::vector<double> w(dim, 0.0);
  double b = 0.0;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(config.seed);
  std::uint64_t t = 0;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t k = n; k > 1; --k) std::swap(order[k - 1], order[detail::draw_index(rng, k)]);
    for (std::size_t idx : order) {
      ++t;
      const double eta = 1.0 / (lambda * static_cast<double>(t));
      const double y = labels[idx];
      const double margin = y * (dot(w, samples[idx]) + b);
      const double shrink = 1.0 - eta * lambda;
      for (double& v : w) v *= shrink;
      b *= shrink;
      if (margin < 1.0) {
        const auto& x = samples[idx];
        for (std::size_t d = 0; d < dim; ++d) w[d] += eta * y * x[d];
        b += eta * y;
      }
      const double norm = std::sqrt(dot(w, w) + b * b);
      if (norm > radius) {
        const double scale = radius / norm;
        for (double& v : w) v *= scale;
        b *= scale;
      }
    }
  }

  SvmModel model;
  model.kernel = KernelType::linear;
  model.c = config.c;
  model.dimension = dim;
  model.weights = std::move(w);
  model.bias = b;
  model.passes = config.epochs;
  return model;
}

/// State reported after every accepted SMO pair update.
struct SmoStep {
  std::size_t i = 0;
  std::size_t j = 0;
  double objective = 0.0;  // dual objective after the update
  std::span<const double> alphas;
  std::span<const int> labels;
  double c = 0.0;
};

using SmoObserver = std::function<void(const SmoStep&)>;

/// Simplified SMO on the dual. Each pass scans i in order; the partner j is
/// drawn uniformly from the seeded generator. Stops after a pass with no KKT
/// violation beyond tolerance (converged) or after max_passes passes.
inline SvmModel train_smo(std::span<const std::vector<double>> samples,
                          std::span<const int> labels, const SvmConfig& config,
                          const SmoObserver& observer = {}) {
  config.validate();
  const std::size_t dim = detail::validate_binary(samples, labels);
  const std::size_t n = samples.size();
  const double c = config.c;
  const double tol = config.tolerance;

  std::vector<double> gram(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double k = config.kernel == KernelType::rbf
                           ? rbf_kernel(samples[i], samples[j], config.gamma)
                           : dot(samples[i], samples[j]);
      gram[i * n + j] = k;
      gram[j * n + i] = k;
    }
  }
  const auto kernel = [&](std::size_t i, std::size_t j) { return gram[i * n + j]; };

  std::vector<double> alpha(n, 0.0);
  std::vector<double> u(n, 0.0);  // sum_k alpha_k y_k K(k, i), bias excluded
  double b = 0.0;
  std::mt19937_64 rng(config.seed);
  bool converged = false;
  int passes = 0;

  while (passes < config.max_passes && !converged) {
    ++passes;
    std::size_t violations = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double yi = labels[i];
      const double ei = u[i] + b - yi;
      const double ri = yi * ei;
      if (!((ri < -tol && alpha[i] < c) || (ri > tol && alpha[i] > 0.0))) continue;
      ++violations;
      if (n < 2) continue;

      std::size_t j = detail::draw_index(rng, n - 1);
      if (j >= i) ++j;
      const double yj = labels[j];
      const double ej = u[j] + b - yj;
      const double ai_old = alpha[i];
      const double aj_old = alpha[j];

      double lo;
      double hi;
      if (yi != yj) {
        lo = std::max(0.0, aj_old - ai_old);
        hi = std::min(c, c + aj_old - ai_old);
      } else {
        lo = std::max(0.0, ai_old + aj_old - c);
        hi = std::min(c, ai_old + aj_old);
      }
      if (lo >= hi) continue;
      const double eta = 2.0 * kernel(i, j) - kernel(i, i) - kernel(j, j);
      if (eta >= 0.0) continue;

      const double snap = 1e-12 * c;
      const auto to_bound = [&](double a) { return a < snap ? 0.0 : a > c - snap ? c : a; };
      const double aj = to_bound(std::clamp(aj_old - yj * (ei - ej) / eta, lo, hi));
      if (std::abs(aj - aj_old) < 1e-12) continue;
      const double ai = to_bound(std::clamp(ai_old + yi * yj * (aj_old - aj), 0.0, c));
      alpha[i] = ai;
      alpha[j] = aj;

      const double di = yi * (ai - ai_old);
      const double dj = yj * (aj - aj_old);
      const double b1 = b - ei - di * kernel(i, i) - dj * kernel(i, j);
      const double b2 = b - ej - di * kernel(i, j) - dj * kernel(j, j);
      if (ai > 0.0 && ai < c) {
        b = b1;
      } else if (aj > 0.0 && aj < c) {
        b = b2;
      } else {
        b = 0.5 * (b1 + b2);
      }
      for (std::size_t k = 0; k < n; ++k) u[k] += di * kernel(i, k) + dj * kernel(j, k);

      if (observer) {
        double objective = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          objective += alpha[k] - 0.5 * alpha[k] * labels[k] * u[k];
        }
        observer(SmoStep{i, j, objective, alpha, labels, c});
      }
    }
    converged = violations == 0;
  }

  SvmModel model;
  model.kernel = config.kernel;
  model.gamma = config.kernel == KernelType::rbf ? config.gamma : 0.0;
  model.c = c;
  model.dimension = dim;
  model.bias = b;
  model.converged = converged;
  model.passes = passes;
  if (config.kernel == KernelType::linear) {
    model.weights.assign(dim, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      if (alpha[k] <= 0.0) continue;
      for (std::size_t d = 0; d < dim; ++d) model.weights[d] += alpha[k] * labels[k] * samples[k][d];
    }
  } else {
    for (std::size_t k = 0; k < n; ++k) {
      if (alpha[k] <= 0.0) continue;
      model.support_vectors.push_back(samples[k]);
      model.coefficients.push_back(alpha[k] * labels[k]);
    }
  }
  return model;
}

/// SMO with the RBF kernel K(x, z) = exp(-gamma |x - z|^2).
inline SvmModel train_rbf(std::span<const std::vector<double>> samples,
                          std::span<const int> labels, SvmConfig config,
                          const SmoObserver& observer = {}) {
  config.kernel = KernelType::rbf;
  return train_smo(samples, labels, config, observer);
}

/// Linear configs train with Pegasos, RBF configs with SMO.
inline SvmModel train_binary(std::span<const std::vector<double>> samples,
                             std::span<const int> labels, const SvmConfig& config) {
  return config.kernel == KernelType::linear ? train_linear(samples, labels, config)
                                             : train_rbf(samples, labels, config);
}

/// Index of the largest value; ties go to the lowest index.
inline std::size_t argmax_lowest(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < values.size(); ++k) {
    if (values[k] > values[best]) best = k;
  }
  return best;
}

struct Prediction {
  std::size_t label = 0;
  std::vector<double> decision_values;  // one per class
};

/// One binary model for two classes (positive = classes[0]), otherwise one
/// one-vs-rest model per class.
struct MulticlassModel {
  std::vector<std::string> classes;
  std::vector<SvmModel> models;

  bool is_binary() const noexcept { return classes.size() == 2 && models.size() == 1; }

  Prediction predict(std::span<const double> x) const {
    Prediction p;
    if (is_binary()) {
      const double f = models.front().decision_value(x);
      p.decision_values = {f, -f};
    } else {
      p.decision_values.reserve(models.size());
      for (const auto& m : models) p.decision_values.push_back(m.decision_value(x));
    }
    p.label = argmax_lowest(p.decision_values);
    return p;
  }
};

/// labels[i] indexes into classes.
inline MulticlassModel train_multiclass(std::span<const std::vector<double>> samples,
                                        std::span<const std::size_t> labels,
                                        std::vector<std::string> classes,
                                        const SvmConfig& config) {
  if (classes.size() < 2) throw DegenerateDataError("need at least two classes");
  if (samples.size() != labels.size()) {
    throw DimensionMismatchError("sample and label counts differ");
  }
  MulticlassModel out{std::move(classes), {}};
  const std::size_t targets = out.classes.size() == 2 ? 1 : out.classes.size();
  std::vector<int> binary(labels.size());
  for (std::size_t k = 0; k < targets; ++k) {
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] >= out.classes.size()) throw ArgumentError("label index out of range");
      binary[i] = labels[i] == k ? 1 : -1;
    }
    try {
      out.models.push_back(train_binary(samples, binary, config));
    } catch (const DegenerateDataError&) {
      throw DegenerateDataError("class '" + out.classes[k] +
                                "' has no training samples or is the only class present");
    }
  }
  return out;
}

inline constexpr int kModelFormatVersion = 1;

inline nlohmann::json to_json(const SvmModel& m) {
  nlohmann::json j{{"kernel", to_string(m.kernel)},
                   {"gamma", m.gamma},
                   {"c", m.c},
                   {"dimension", m.dimension},
                   {"bias", m.bias},
                   {"converged", m.converged},
                   {"passes", m.passes}};
  if (m.kernel == KernelType::linear) {
    j["weights"] = m.weights;
  } else {
    j["support_vectors"] = m.support_vectors;
    j["coefficients"] = m.coefficients;
  }
  return j;
}

inline SvmModel svm_model_from_json(const nlohmann::json& j) {
  SvmModel m;
  m.kernel = parse_kernel(j.at("kernel").get<std::string>());
  m.gamma = j.at("gamma").get<double>();
  m.c = j.at("c").get<double>();
  m.dimension = j.at("dimension").get<std::size_t>();
  m.bias = j.at("bias").get<double>();
  m.converged = j.value("converged", true);
  m.passes = j.value("passes", 0);
  if (m.kernel == KernelType::linear) {
    m.weights = j.at("weights").get<std::vector<double>>();
    if (m.weights.size() != m.dimension) throw FormatError("weight vector length mismatch");
  } else {
    m.support_vectors = j.at("support_vectors").get<std::vector<std::vector<double>>>();
    m.coefficients = j.at("coefficients").get<std::vector<double>>();
    if (m.support_vectors.size() != m.coefficients.size()) {
      throw FormatError("support vector and coefficient counts differ");
    }
  }
  return m;
}

inline nlohmann::json to_json(const MulticlassModel& m) {
  nlohmann::json models = nlohmann::json::array();
  for (const auto& model : m.models) models.push_back(to_json(model));
  return {{"format", "symlbp-svm"},
          {"version", kModelFormatVersion},
          {"scheme", m.is_binary() ? "binary" : "one-vs-rest"},
          {"classes", m.classes},
          {"models", std::move(models)}};
}

inline MulticlassModel multiclass_model_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != "symlbp-svm") throw FormatError("not a model file");
    if (j.at("version").get<int>() != kModelFormatVersion) {
      throw FormatError("unsupported model version " + j.at("version").dump());
    }
    MulticlassModel m;
    m.classes = j.at("classes").get<std::vector<std::string>>();
    for (const auto& model : j.at("models")) m.models.push_back(svm_model_from_json(model));
    const std::size_t expected = m.classes.size() == 2 ? 1 : m.classes.size();
    if (m.classes.size() < 2 || m.models.size() != expected) {
      throw FormatError("model count does not match class count");
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed model JSON: ") + e.what());
  }
}

}  // namespace symlbp
