#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

namespace crux {

// Per-feature z-score applied before the first layer.
struct FeatureNormalizer {
  std::vector<double> mean;
  std::vector<double> stddev;

  static FeatureNormalizer identity(std::size_t features);
  // Population statistics; a constant feature gets stddev 1.
  static FeatureNormalizer fit(const std::vector<std::vector<double>>& rows);

  std::vector<double> apply(std::span<const double> x) const;
};

// sigmoid(w2 . relu(w1 x + b1) + b2) with x the normalized feature vector.
struct FusionParams {
  static constexpr int kFormatVersion = 1;

  std::size_t features = 2;  // 2 = [delta_h, gc], 1 = delta_h only
  std::size_t hidden = 16;
  std::vector<double> w1;  // hidden x features, row-major
  std::vector<double> b1;  // hidden
  std::vector<double> w2;  // hidden
  double b2 = 0.0;
  FeatureNormalizer normalizer;
  std::uint64_t seed = 0;
  double loss = 0.0;

  static FusionParams zeros(std::size_t features, std::size_t hidden);

  // Throws DimensionMismatch / ConfigInvalid on inconsistent shapes.
  void validate() const;

  nlohmann::json to_json() const;
  static FusionParams from_json(const nlohmann::json& j);
  void save(const std::filesystem::path& path) const;
  static FusionParams load(const std::filesystem::path& path);

  bool operator==(const FusionParams&) const;
};

struct TrainExample {
  std::vector<double> features;
  int label = 0;
};

struct TrainHyper {
  std::size_t hidden = 16;
  double lr = 1e-3;
  int epochs = 200;
  std::size_t batch = 32;
  std::uint64_t seed = 0;
};

double mlp_forward(std::span<const double> features, const FusionParams& p);

// Mean binary cross-entropy over `batch` and, when `grad` is non-null, its
// gradient with respect to w1, b1, w2, b2 (written into the matching fields
// of *grad; the normalizer is held fixed).
double loss_and_gradient(const FusionParams& p, std::span<const TrainExample> batch,
                         FusionParams* grad);

// Mini-batch Adam on binary cross-entropy. Deterministic for a fixed seed.
// Requires at least 10 examples with both labels present.
FusionParams mlp_train(const std::vector<TrainExample>& data, const TrainHyper& hyper);

}  // namespace crux
