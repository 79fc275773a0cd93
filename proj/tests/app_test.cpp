#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include <set>
#include <sstream>

#include "crux/app.hpp"
#include "crux/error.hpp"
#include "crux/sample_cache.hpp"
#include "crux/synthetic.hpp"
#include "support.hpp"

using namespace crux;
namespace fs = std::filesystem;

namespace {

struct Workspace {
  fs::path root;
  app::Options opts;
  std::ostringstream log;
};

std::unique_ptr<Workspace> synthetic_workspace(const std::string& name, std::size_t records = 60) {
  auto ws = std::make_unique<Workspace>();
  ws->root = testing_support::scratch_dir(name);
  app::cmd_synth(ws->root / "syn", records, 10, 7);
  ws->opts.dataset = ws->root / "syn" / "dataset.jsonl";
  ws->opts.cache = ws->root / "cache.jsonl";
  ws->opts.out = ws->root / "out";
  ws->opts.backend_url = "mock:" + (ws->root / "syn" / "gen_script.json").string();
  ws->opts.nli_url = "mock:equality";
  ws->opts.log = &ws->log;
  return ws;
}

std::size_t line_count(const fs::path& p) {
  const auto text = testing_support::read_file(p);
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

}  // namespace

TEST(Synthetic, RegimesCycle) {
  const auto suite = make_synthetic_suite(9, 10, 3);
  ASSERT_EQ(suite.records.size(), 9u);
  EXPECT_EQ(suite.script.size(), 18u);
  for (std::size_t i = 0; i < 9; ++i) EXPECT_EQ(static_cast<int>(suite.regimes[i]), static_cast<int>(i % 3));
  for (const auto& [fp, answers] : suite.script) EXPECT_EQ(answers.size(), 10u);
}

TEST(App, SplitIsDeterministicAndRoughlySeventyThirty) {
  std::size_t train = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto id = "rec-" + std::to_string(i);
    EXPECT_EQ(app::in_train_split(id, 5), app::in_train_split(id, 5));
    train += app::in_train_split(id, 5) ? 1 : 0;
  }
  EXPECT_GT(train, 640u);
  EXPECT_LT(train, 760u);
}

TEST(App, SampleFillsCacheThenHitsIt) {
  auto ws = synthetic_workspace("app_sample", 5);
  const auto first = app::cmd_sample(ws->opts);
  EXPECT_EQ(first.records, 5u);
  EXPECT_EQ(first.backend_calls, 10u);
  EXPECT_EQ(line_count(ws->opts.cache), 10u);
  const auto second = app::cmd_sample(ws->opts);
  EXPECT_EQ(second.backend_calls, 0u);
  EXPECT_EQ(second.cache_hits, 10u);
  EXPECT_EQ(line_count(ws->opts.cache), 10u);
  EXPECT_TRUE(fs::exists(ws->opts.out / "manifest_sample.json"));
}

TEST(App, UnreachableBackendLeavesNoCsv) {
  auto ws = synthetic_workspace("app_unreachable", 3);
  ws->opts.backend_url = "http://127.0.0.1:9";
  try {
    app::cmd_score(ws->opts);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBackendUnavailable);
  }
  EXPECT_FALSE(fs::exists(ws->opts.out / "scores.csv"));
}

TEST(App, FullPipelineOutputs) {
  auto ws = synthetic_workspace("app_full");
  const auto results = app::cmd_all(ws->opts);
  ASSERT_EQ(results.size(), 7u);
  EXPECT_EQ(results[0].method, "crux");
  EXPECT_EQ(results[0].auroc, 1.0);

  const auto scores = app::read_csv(ws->opts.out / "scores.csv");
  EXPECT_EQ(scores.header, app::score_columns());
  EXPECT_EQ(scores.header.size(), 10u);
  EXPECT_EQ(scores.rows.size(), 60u);
  for (const auto& row : scores.rows) EXPECT_FALSE(row.back().empty());

  const auto summary = app::read_csv(ws->opts.out / "summary.csv");
  EXPECT_EQ(summary.header, (std::vector<std::string>{"method_name", "dataset", "auroc"}));
  EXPECT_EQ(summary.rows[0][0], "crux");

  std::set<std::string> roc_files;
  for (const auto& entry : fs::directory_iterator(ws->opts.out)) {
    const auto name = entry.path().filename().string();
    if (name.rfind("roc_", 0) == 0) roc_files.insert(name);
  }
  EXPECT_EQ(roc_files.size(), 7u);

  const auto labels = app::read_csv(ws->opts.out / "labels.csv");
  EXPECT_EQ(labels.rows.size(), 60u);
  const auto manifest = nlohmann::json::parse(testing_support::read_file(ws->opts.out / "manifest_eval.json"));
  EXPECT_EQ(manifest["command"], "eval");
  EXPECT_EQ(manifest["config"]["n"], "10");
}

TEST(App, NoGcAblationUsesOwnHead) {
  auto ws = synthetic_workspace("app_no_gc");
  app::cmd_all(ws->opts);
  auto ablated = ws->opts;
  ablated.ablation_no_gc = true;
  const auto results = app::cmd_all(ablated);
  EXPECT_EQ(results[0].method, "crux_no_gc");
  EXPECT_LT(results[0].auroc, 1.0);
  EXPECT_EQ(FusionParams::load(ws->opts.out / "fusion_params_no-gc.json").features, 1u);
  EXPECT_EQ(FusionParams::load(ws->opts.out / "fusion_params.json").features, 2u);
}

TEST(App, NoClusteringMatchesEqualityClustering) {
  // Under the equality NLI, exact matching and entailment clustering agree.
  auto ws = synthetic_workspace("app_no_clust");
  app::cmd_score(ws->opts);
  const auto clustered = testing_support::read_file(ws->opts.out / "scores.csv");
  auto exact = ws->opts;
  exact.no_clustering = true;
  app::cmd_score(exact);
  EXPECT_EQ(testing_support::read_file(ws->opts.out / "scores.csv"), clustered);
}

TEST(App, ParallelJobsMatchSerial) {
  auto ws = synthetic_workspace("app_jobs");
  app::cmd_score(ws->opts);
  const auto serial = testing_support::read_file(ws->opts.out / "scores.csv");
  auto parallel = ws->opts;
  parallel.jobs = 4;
  app::cmd_score(parallel);
  EXPECT_EQ(testing_support::read_file(ws->opts.out / "scores.csv"), serial);
}

TEST(App, MissingLabelsFile) {
  auto ws = synthetic_workspace("app_no_labels", 3);
  try {
    app::cmd_eval(ws->opts);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFileUnreadable);
  }
}

TEST(App, ConfigOverrides) {
  app::Options o;
  o.n = 4;
  o.gc = GcVariant::kCenter;
  o.no_clustering = true;
  o.ablation_no_gc = true;
  o.seed = 42;
  const auto cfg = app::resolve_config(o);
  EXPECT_EQ(cfg.n, 4);
  EXPECT_EQ(cfg.gc_variant, GcVariant::kCenter);
  EXPECT_FALSE(cfg.use_clustering);
  EXPECT_FALSE(cfg.use_gc);
  EXPECT_EQ(cfg.train.seed, 42u);
  EXPECT_EQ(app::params_path(o).filename(), "fusion_params_no-gc.json");
}
