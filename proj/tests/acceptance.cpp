// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Tolerances are fixed constants below.

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "crux/app.hpp"
#include "crux/clustering.hpp"
#include "crux/consistency.hpp"
#include "crux/entropy.hpp"
#include "crux/evaluation.hpp"
#include "crux/fusion.hpp"
#include "crux/spectral.hpp"
#include "support.hpp"

using namespace crux;
using testing_support::Gen;
namespace fs = std::filesystem;

namespace {

constexpr double kEntropyExampleTol = 1e-6;
constexpr double kEntropyUniformTol = 1e-9;
constexpr double kEntropyRuntimeSeconds = 1.0;
constexpr int kPartitionPairs = 1000;
constexpr double kDeltaHBoundSlack = 1e-9;
constexpr double kGcTol = 1e-12;
constexpr int kSpectralTrials = 200;
constexpr std::size_t kSpectralMaxM = 6;
constexpr double kSpectralTol = 1e-6;
constexpr int kAurocTrials = 500;
constexpr int kAurocMaxN = 100;
constexpr double kAurocTol = 1e-9;
constexpr int kGradientPoints = 50;
constexpr double kGradientRelTol = 1e-4;
constexpr double kFiniteDiffStep = 1e-6;
constexpr int kClusteringTrials = 1000;
constexpr std::size_t kSyntheticRecords = 60;
constexpr double kEndToEndSeconds = 30.0;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

int failures = 0;

void report(int id, const char* name, const std::function<Outcome()>& check) {
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("exception: ") + e.what();
  }
  if (!o.pass) ++failures;
  std::printf("%s criterion %d: %s%s%s\n", o.pass ? "PASS" : "FAIL", id, name,
              o.detail.empty() ? "" : " -- ", o.detail.c_str());
  std::fflush(stdout);
}

ClusterDistribution dist(std::vector<double> p) { return ClusterDistribution{std::move(p)}; }

Outcome entropy_correctness() {
  Outcome o;
  const auto t0 = Clock::now();
  const double h = entropy(dist({0.7, 0.2, 0.1}));
  o.require(std::abs(h - 0.801819) <= kEntropyExampleTol, "entropy([0.7,0.2,0.1]) = " + std::to_string(h));
  for (int k = 2; k <= 10; ++k) {
    const double u = entropy(dist(std::vector<double>(static_cast<std::size_t>(k), 1.0 / k)));
    o.require(std::abs(u - std::log(static_cast<double>(k))) <= kEntropyUniformTol,
              "uniform k=" + std::to_string(k));
  }
  o.require(entropy(dist({1.0})) == 0.0, "singleton entropy not exactly 0");
  const double elapsed = seconds_since(t0);
  o.require(elapsed < kEntropyRuntimeSeconds, "runtime " + std::to_string(elapsed) + " s");
  return o;
}

Outcome delta_h_antisymmetry() {
  Outcome o;
  Gen g(1001);
  const double bound = std::log(10.0) + kDeltaHBoundSlack;
  for (int i = 0; i < kPartitionPairs; ++i) {
    const auto a = cluster_distribution(g.partition(10), 10);
    const auto b = cluster_distribution(g.partition(10), 10);
    const double ab = entropy_reduction(a, b);
    const double ba = entropy_reduction(b, a);
    o.require(ab == -ba, "antisymmetry broken at pair " + std::to_string(i));
    o.require(std::abs(ab) <= bound, "bound broken at pair " + std::to_string(i));
  }
  return o;
}

SimilarityMatrix uniform_distance(std::size_t m, double d) {
  SimilarityMatrix w(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) w.set_symmetric(i, j, 1.0 - d);
  }
  return w;
}

Outcome gc_closed_forms() {
  Outcome o;
  const double m2 = gc_pairwise(uniform_distance(2, 0.4));
  o.require(std::abs(m2 - -0.4) <= kGcTol, "m=2 d=0.4 gives " + std::to_string(m2));
  const double m4 = gc_pairwise(uniform_distance(4, 0.5));
  o.require(std::abs(m4 - -0.5) <= kGcTol, "m=4 d=0.5 gives " + std::to_string(m4));
  for (std::size_t m : {2u, 4u, 20u}) {
    const auto ones = SimilarityMatrix::all_ones(m);
    o.require(gc_pairwise(ones) == 0.0, "all-ones pairwise not exactly 0");
    o.require(gc_center(ones) == 0.0, "all-ones center not exactly 0");
  }
  return o;
}

std::vector<double> eigen_oracle(const std::vector<double>& a, std::size_t m) {
  Eigen::MatrixXd mat(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) mat(i, j) = a[i * m + j];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mat, Eigen::EigenvaluesOnly);
  return std::vector<double>(es.eigenvalues().data(), es.eigenvalues().data() + m);
}

Outcome spectral_oracle() {
  Outcome o;
  Gen g(4004);
  for (int t = 0; t < kSpectralTrials; ++t) {
    const auto m = static_cast<std::size_t>(g.integer(1, static_cast<int>(kSpectralMaxM)));
    const auto w = g.similarity(m);
    const auto jac = jacobi_eigen(w, m).values;
    const auto ref = eigen_oracle(w, m);
    for (std::size_t k = 0; k < m; ++k) {
      o.require(std::abs(jac[k] - ref[k]) <= kSpectralTol, "W eigenvalue mismatch, trial " + std::to_string(t));
    }
    const SimilarityMatrix sim(m, w);
    const auto lap = laplacian_eigenvalues(sim);
    const auto lap_ref = eigen_oracle(normalized_laplacian(sim), m);
    for (std::size_t k = 0; k < m; ++k) {
      o.require(std::abs(lap[k] - lap_ref[k]) <= kSpectralTol, "L eigenvalue mismatch, trial " + std::to_string(t));
      o.require(lap[k] >= -kSpectralTol && lap[k] <= 2.0 + kSpectralTol,
                "L eigenvalue out of [0,2], trial " + std::to_string(t));
    }
  }
  return o;
}

Outcome auroc_equivalence() {
  Outcome o;
  Gen g(5005);
  for (int t = 0; t < kAurocTrials; ++t) {
    const int n = g.integer(2, kAurocMaxN);
    std::vector<double> s;
    std::vector<int> y;
    const bool ties = t % 2 == 0;
    for (int i = 0; i < n; ++i) {
      s.push_back(ties ? static_cast<double>(g.integer(0, 5)) : g.real(0.0, 1.0));
      y.push_back(i == 0 ? 1 : i == 1 ? 0 : g.integer(0, 1));
    }
    const double mw = auroc(s, y);
    const double trap = roc_points(s, y).auroc;
    o.require(std::abs(mw - trap) <= kAurocTol, "estimators disagree, trial " + std::to_string(t));
  }
  o.require(auroc({0.9, 0.8, 0.4, 0.3}, {1, 0, 1, 0}) == 0.75, "worked example is not exactly 0.75");
  return o;
}

std::vector<double*> parameters(FusionParams& p) {
  std::vector<double*> out;
  for (auto& v : p.w1) out.push_back(&v);
  for (auto& v : p.b1) out.push_back(&v);
  for (auto& v : p.w2) out.push_back(&v);
  out.push_back(&p.b2);
  return out;
}

Outcome gradient_check() {
  Outcome o;
  Gen g(6006);
  int points = 0;
  while (points < kGradientPoints) {
    const auto f = static_cast<std::size_t>(g.integer(1, 2));
    auto p = FusionParams::zeros(f, static_cast<std::size_t>(g.integer(1, 16)));
    for (double* v : parameters(p)) *v = g.real(-1.0, 1.0);
    std::vector<TrainExample> batch;
    const int size = g.integer(1, 8);
    for (int i = 0; i < size; ++i) {
      std::vector<double> x(f);
      for (auto& v : x) v = g.real(-2.0, 2.0);
      batch.push_back({x, g.integer(0, 1)});
    }
    // Central differences are undefined across a ReLU kink.
    bool near_kink = false;
    for (const auto& ex : batch) {
      for (std::size_t k = 0; k < p.hidden; ++k) {
        double z = p.b1[k];
        for (std::size_t j = 0; j < f; ++j) z += p.w1[k * f + j] * ex.features[j];
        if (std::abs(z) < 1e-3) near_kink = true;
      }
    }
    if (near_kink) continue;
    FusionParams grad;
    loss_and_gradient(p, batch, &grad);
    auto gp = parameters(grad);
    auto pp = parameters(p);
    double diff2 = 0.0, an2 = 0.0, nu2 = 0.0;
    for (std::size_t i = 0; i < pp.size(); ++i) {
      const double keep = *pp[i];
      *pp[i] = keep + kFiniteDiffStep;
      const double up = loss_and_gradient(p, batch, nullptr);
      *pp[i] = keep - kFiniteDiffStep;
      const double down = loss_and_gradient(p, batch, nullptr);
      *pp[i] = keep;
      const double numeric = (up - down) / (2.0 * kFiniteDiffStep);
      diff2 += (numeric - *gp[i]) * (numeric - *gp[i]);
      an2 += *gp[i] * *gp[i];
      nu2 += numeric * numeric;
    }
    const double scale = std::max(std::sqrt(an2), std::sqrt(nu2));
    const double rel = scale > 0.0 ? std::sqrt(diff2) / scale : 0.0;
    o.require(rel <= kGradientRelTol, "relative error " + std::to_string(rel) + " at point " + std::to_string(points));
    ++points;
  }

  std::vector<TrainExample> data;
  for (int i = 0; i < 40; ++i) {
    data.push_back({{g.real(-1.0, 3.0), g.real(-1.0, 0.0)}, g.integer(0, 1)});
  }
  data[0].label = 0;
  data[1].label = 1;
  TrainHyper h;
  h.seed = 1234;
  const auto a = mlp_train(data, h);
  const auto b = mlp_train(data, h);
  auto same_bits = [](const std::vector<double>& x, const std::vector<double>& y) {
    return x.size() == y.size() && std::memcmp(x.data(), y.data(), x.size() * sizeof(double)) == 0;
  };
  o.require(same_bits(a.w1, b.w1) && same_bits(a.b1, b.b1) && same_bits(a.w2, b.w2) &&
                std::memcmp(&a.b2, &b.b2, sizeof(double)) == 0 && a == b,
            "training is not bitwise reproducible");
  return o;
}

Outcome clustering_oracle() {
  Outcome o;
  Gen g(7007);
  EqualityEntailmentBackend eq;
  for (int t = 0; t < kClusteringTrials; ++t) {
    const auto answers = g.answers(static_cast<std::size_t>(g.integer(1, 15)), g.integer(1, 8));
    const auto p = cluster_answers(answers, eq, 0.5);
    bool valid = true;
    try {
      p.validate(answers.size());
    } catch (const std::exception&) {
      valid = false;
    }
    o.require(valid, "partition is not a disjoint cover, trial " + std::to_string(t));
    o.require(p.clusters == testing_support::group_by_normalized(answers).clusters,
              "clustering differs from group-by, trial " + std::to_string(t));
  }
  return o;
}

app::Options synthetic_options(const fs::path& root, const fs::path& out, std::ostream* log) {
  app::Options opts;
  opts.dataset = root / "syn" / "dataset.jsonl";
  opts.cache = root / "cache.jsonl";
  opts.out = out;
  opts.backend_url = "mock:" + (root / "syn" / "gen_script.json").string();
  opts.nli_url = "mock:equality";
  opts.log = log;
  return opts;
}

double method_auroc(const std::vector<app::MethodResult>& results, const std::string& name) {
  for (const auto& r : results) {
    if (r.method == name) return r.auroc;
  }
  throw std::runtime_error("no result for " + name);
}

Outcome end_to_end() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto root = testing_support::scratch_dir("acceptance_e2e");
  std::ostringstream log;
  app::cmd_synth(root / "syn", kSyntheticRecords, 10, 7);
  const auto full = app::cmd_all(synthetic_options(root, root / "crux", &log));
  auto ablated_opts = synthetic_options(root, root / "no_gc", &log);
  ablated_opts.ablation_no_gc = true;
  const auto ablated = app::cmd_all(ablated_opts);
  const double elapsed = seconds_since(t0);

  const double crux = method_auroc(full, "crux");
  const double no_gc = method_auroc(ablated, "crux_no_gc");
  o.require(crux == 1.0, "held-out CRUX AUROC " + std::to_string(crux));
  o.require(crux > no_gc, "CRUX " + std::to_string(crux) + " does not exceed no-gc " + std::to_string(no_gc));
  o.require(elapsed < kEndToEndSeconds, "runtime " + std::to_string(elapsed) + " s");
  if (o.pass) {
    o.detail = "crux=" + std::to_string(crux) + " no_gc=" + std::to_string(no_gc) +
               " time=" + std::to_string(elapsed) + "s";
  }
  return o;
}

Outcome replay_determinism() {
  Outcome o;
  const auto root = testing_support::scratch_dir("acceptance_replay");
  std::ostringstream log;
  app::cmd_synth(root / "syn", kSyntheticRecords, 10, 7);
  app::cmd_sample(synthetic_options(root, root / "warmup", &log));  // warm the cache
  app::cmd_all(synthetic_options(root, root / "run_a", &log));
  app::cmd_all(synthetic_options(root, root / "run_b", &log));
  std::size_t compared = 0;
  for (const auto& entry : fs::directory_iterator(root / "run_a")) {
    if (entry.path().extension() != ".csv") continue;
    const auto other = root / "run_b" / entry.path().filename();
    o.require(fs::exists(other), "run_b lacks " + entry.path().filename().string());
    o.require(testing_support::read_file(entry.path()) == testing_support::read_file(other),
              entry.path().filename().string() + " differs between runs");
    ++compared;
  }
  o.require(compared >= 10, "only " + std::to_string(compared) + " CSV files produced");
  if (o.pass) o.detail = std::to_string(compared) + " CSV files byte-identical";
  return o;
}

}  // namespace

int main() {
  report(1, "entropy correctness", entropy_correctness);
  report(2, "entropy reduction antisymmetry and bounds", delta_h_antisymmetry);
  report(3, "global consistency closed forms", gc_closed_forms);
  report(4, "spectral oracle", spectral_oracle);
  report(5, "AUROC dual-estimator equivalence", auroc_equivalence);
  report(6, "MLP gradient check and reproducible training", gradient_check);
  report(7, "clustering oracle", clustering_oracle);
  report(8, "end-to-end synthetic discrimination", end_to_end);
  report(9, "replay determinism", replay_determinism);
  return failures == 0 ? 0 : 1;
}
