#include "crux/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>

#include "crux/error.hpp"

namespace crux {

using nlohmann::json;

FeatureNormalizer FeatureNormalizer::identity(std::size_t features) {
  return {std::vector<double>(features, 0.0), std::vector<double>(features, 1.0)};
}

FeatureNormalizer FeatureNormalizer::fit(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw Error(ErrorCode::kEmptyData, "cannot fit a normalizer to no rows");
  const std::size_t f = rows.front().size();
  FeatureNormalizer n{std::vector<double>(f, 0.0), std::vector<double>(f, 0.0)};
  for (const auto& r : rows) {
    if (r.size() != f) throw Error(ErrorCode::kDimensionMismatch, "ragged feature rows");
    for (std::size_t k = 0; k < f; ++k) n.mean[k] += r[k];
  }
  const double count = static_cast<double>(rows.size());
  for (auto& m : n.mean) m /= count;
  for (const auto& r : rows) {
    for (std::size_t k = 0; k < f; ++k) n.stddev[k] += (r[k] - n.mean[k]) * (r[k] - n.mean[k]);
  }
  for (auto& s : n.stddev) {
    s = std::sqrt(s / count);
    if (!(s > 1e-12)) s = 1.0;
  }
  return n;
}

std::vector<double> FeatureNormalizer::apply(std::span<const double> x) const {
  if (x.size() != mean.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "feature vector has " + std::to_string(x.size()) +
                                                   " entries, normalizer expects " +
                                                   std::to_string(mean.size()));
  }
  std::vector<double> out(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) out[k] = (x[k] - mean[k]) / stddev[k];
  return out;
}

FusionParams FusionParams::zeros(std::size_t features, std::size_t hidden) {
  FusionParams p;
  p.features = features;
  p.hidden = hidden;
  p.w1.assign(hidden * features, 0.0);
  p.b1.assign(hidden, 0.0);
  p.w2.assign(hidden, 0.0);
  p.normalizer = FeatureNormalizer::identity(features);
  return p;
}

void FusionParams::validate() const {
  if (hidden < 1) throw Error(ErrorCode::kConfigInvalid, "hidden width must be >= 1");
  if (features != 1 && features != 2) {
    throw Error(ErrorCode::kConfigInvalid, "fusion head takes 1 or 2 features");
  }
  if (w1.size() != hidden * features || b1.size() != hidden || w2.size() != hidden ||
      normalizer.mean.size() != features || normalizer.stddev.size() != features) {
    throw Error(ErrorCode::kDimensionMismatch, "fusion parameter shapes are inconsistent");
  }
  for (double s : normalizer.stddev) {
    if (!(s > 0.0)) throw Error(ErrorCode::kConfigInvalid, "normalizer stddev must be > 0");
  }
}

bool FusionParams::operator==(const FusionParams& o) const {
  return features == o.features && hidden == o.hidden && w1 == o.w1 && b1 == o.b1 &&
         w2 == o.w2 && b2 == o.b2 && normalizer.mean == o.normalizer.mean &&
         normalizer.stddev == o.normalizer.stddev && seed == o.seed && loss == o.loss;
}

json FusionParams::to_json() const {
  return {
      {"version", kFormatVersion},
      {"dims", {{"features", features}, {"hidden", hidden}}},
      {"w1", w1},
      {"b1", b1},
      {"w2", w2},
      {"b2", b2},
      {"normalizer", {{"mean", normalizer.mean}, {"stddev", normalizer.stddev}}},
      {"seed", seed},
      {"loss", loss},
  };
}

FusionParams FusionParams::from_json(const json& j) {
  FusionParams p;
  try {
    if (j.at("version").get<int>() != kFormatVersion) {
      throw Error(ErrorCode::kSchemaMismatch, "unsupported fusion params version");
    }
    p.features = j.at("dims").at("features").get<std::size_t>();
    p.hidden = j.at("dims").at("hidden").get<std::size_t>();
    p.w1 = j.at("w1").get<std::vector<double>>();
    p.b1 = j.at("b1").get<std::vector<double>>();
    p.w2 = j.at("w2").get<std::vector<double>>();
    p.b2 = j.at("b2").get<double>();
    p.normalizer.mean = j.at("normalizer").at("mean").get<std::vector<double>>();
    p.normalizer.stddev = j.at("normalizer").at("stddev").get<std::vector<double>>();
    p.seed = j.at("seed").get<std::uint64_t>();
    p.loss = j.at("loss").get<double>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchemaMismatch, "fusion params: " + std::string(e.what()));
  }
  p.validate();
  return p;
}

void FusionParams::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kFileUnreadable, "cannot write " + path.string());
  out << to_json().dump(2) << '\n';
}

FusionParams FusionParams::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kMissingFusionParams, "cannot read " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchemaMismatch, "fusion params: " + std::string(e.what()));
  }
  return from_json(j);
}

namespace {

struct Activations {
  std::vector<double> x;  // normalized input
  std::vector<double> z;  // pre-activation
  std::vector<double> h;  // relu(z)
  double logit = 0.0;
};

Activations forward(std::span<const double> features, const FusionParams& p) {
  Activations a;
  a.x = p.normalizer.apply(features);
  a.z.resize(p.hidden);
  a.h.resize(p.hidden);
  a.logit = p.b2;
  for (std::size_t k = 0; k < p.hidden; ++k) {
    double z = p.b1[k];
    for (std::size_t f = 0; f < p.features; ++f) z += p.w1[k * p.features + f] * a.x[f];
    a.z[k] = z;
    a.h[k] = z > 0.0 ? z : 0.0;
    a.logit += p.w2[k] * a.h[k];
  }
  return a;
}

double sigmoid(double o) {
  if (o >= 0.0) return 1.0 / (1.0 + std::exp(-o));
  const double e = std::exp(o);
  return e / (1.0 + e);
}

// Numerically stable -[y log s(o) + (1-y) log(1-s(o))].
double bce_with_logit(double o, int y) {
  return std::max(o, 0.0) - o * static_cast<double>(y) + std::log1p(std::exp(-std::abs(o)));
}

// Uniform in [0,1) from the top 53 bits, independent of the standard
// library's distribution implementations.
double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * unit_uniform(rng);
}

struct AdamSlot {
  std::vector<double> m;
  std::vector<double> v;

  explicit AdamSlot(std::size_t size = 0) : m(size, 0.0), v(size, 0.0) {}

  void step(std::vector<double>& param, const std::vector<double>& grad, double lr,
            double bias1, double bias2) {
    constexpr double kBeta1 = 0.9;
    constexpr double kBeta2 = 0.999;
    constexpr double kEps = 1e-8;
    for (std::size_t i = 0; i < param.size(); ++i) {
      m[i] = kBeta1 * m[i] + (1.0 - kBeta1) * grad[i];
      v[i] = kBeta2 * v[i] + (1.0 - kBeta2) * grad[i] * grad[i];
      const double m_hat = m[i] / bias1;
      const double v_hat = v[i] / bias2;
      param[i] -= lr * m_hat / (std::sqrt(v_hat) + kEps);
    }
  }
};

}  // namespace

double mlp_forward(std::span<const double> features, const FusionParams& p) {
  p.validate();
  if (features.size() != p.features) {
    throw Error(ErrorCode::kDimensionMismatch, "expected " + std::to_string(p.features) +
                                                   " features, got " +
                                                   std::to_string(features.size()));
  }
  const double s = sigmoid(forward(features, p).logit);
  // Keep the open-interval contract when the logit saturates.
  return std::clamp(s, std::numeric_limits<double>::min(), std::nextafter(1.0, 0.0));
}

double loss_and_gradient(const FusionParams& p, std::span<const TrainExample> batch,
                         FusionParams* grad) {
  if (batch.empty()) throw Error(ErrorCode::kEmptyData, "empty batch");
  if (grad) {
    *grad = FusionParams::zeros(p.features, p.hidden);
    grad->normalizer = p.normalizer;
  }
  const double scale = 1.0 / static_cast<double>(batch.size());
  double loss = 0.0;
  for (const auto& ex : batch) {
    if (ex.features.size() != p.features) {
      throw Error(ErrorCode::kDimensionMismatch, "training example has the wrong feature count");
    }
    const Activations a = forward(ex.features, p);
    loss += bce_with_logit(a.logit, ex.label) * scale;
    if (!grad) continue;
    const double d_logit = (sigmoid(a.logit) - static_cast<double>(ex.label)) * scale;
    grad->b2 += d_logit;
    for (std::size_t k = 0; k < p.hidden; ++k) {
      grad->w2[k] += d_logit * a.h[k];
      if (a.z[k] <= 0.0) continue;
      const double dz = d_logit * p.w2[k];
      grad->b1[k] += dz;
      for (std::size_t f = 0; f < p.features; ++f) grad->w1[k * p.features + f] += dz * a.x[f];
    }
  }
  return loss;
}

FusionParams mlp_train(const std::vector<TrainExample>& data, const TrainHyper& hyper) {
  if (data.empty()) throw Error(ErrorCode::kEmptyData, "no training examples");
  if (data.size() < 10) {
    throw Error(ErrorCode::kEmptyData, "need at least 10 training examples, got " +
                                           std::to_string(data.size()));
  }
  if (hyper.hidden < 1 || hyper.batch < 1 || hyper.epochs < 0 || !(hyper.lr > 0.0)) {
    throw Error(ErrorCode::kConfigInvalid, "invalid training hyperparameters");
  }
  const std::size_t f = data.front().features.size();
  std::size_t positives = 0;
  std::vector<std::vector<double>> rows;
  rows.reserve(data.size());
  for (const auto& ex : data) {
    if (ex.label != 0 && ex.label != 1) throw Error(ErrorCode::kConfigInvalid, "labels must be 0/1");
    if (ex.features.size() != f) throw Error(ErrorCode::kDimensionMismatch, "ragged features");
    for (double x : ex.features) {
      if (!std::isfinite(x)) throw Error(ErrorCode::kConfigInvalid, "non-finite feature");
    }
    positives += static_cast<std::size_t>(ex.label);
    rows.push_back(ex.features);
  }
  if (positives == 0 || positives == data.size()) {
    throw Error(ErrorCode::kDegenerateLabels, "training data holds a single class");
  }

  std::mt19937_64 rng(hyper.seed);
  FusionParams p = FusionParams::zeros(f, hyper.hidden);
  p.seed = hyper.seed;
  p.normalizer = FeatureNormalizer::fit(rows);
  p.validate();
  const double w1_bound = std::sqrt(6.0 / static_cast<double>(f));
  const double w2_bound = std::sqrt(6.0 / static_cast<double>(hyper.hidden + 1));
  for (auto& w : p.w1) w = uniform(rng, -w1_bound, w1_bound);
  for (auto& w : p.w2) w = uniform(rng, -w2_bound, w2_bound);

  AdamSlot s_w1(p.w1.size()), s_b1(p.b1.size()), s_w2(p.w2.size()), s_b2(1);
  std::vector<std::size_t> order(data.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::vector<TrainExample> batch;
  batch.reserve(hyper.batch);
  FusionParams grad;
  int t = 0;

  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    for (std::size_t i = order.size() - 1; i > 0; --i) {
      const auto j = static_cast<std::size_t>(rng() % (i + 1));
      std::swap(order[i], order[j]);
    }
    for (std::size_t start = 0; start < order.size(); start += hyper.batch) {
      batch.clear();
      for (std::size_t i = start; i < std::min(order.size(), start + hyper.batch); ++i) {
        batch.push_back(data[order[i]]);
      }
      loss_and_gradient(p, batch, &grad);
      ++t;
      const double bias1 = 1.0 - std::pow(0.9, t);
      const double bias2 = 1.0 - std::pow(0.999, t);
      s_w1.step(p.w1, grad.w1, hyper.lr, bias1, bias2);
      s_b1.step(p.b1, grad.b1, hyper.lr, bias1, bias2);
      s_w2.step(p.w2, grad.w2, hyper.lr, bias1, bias2);
      std::vector<double> b2{p.b2};
      s_b2.step(b2, {grad.b2}, hyper.lr, bias1, bias2);
      p.b2 = b2[0];
    }
  }
  p.loss = loss_and_gradient(p, data, nullptr);
  return p;
}

}  // namespace crux
