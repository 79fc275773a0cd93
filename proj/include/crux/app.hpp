#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "crux/backends.hpp"
#include "crux/config.hpp"
#include "crux/dataset.hpp"
#include "crux/evaluation.hpp"

namespace crux::app {

enum class Split { kTest, kTrain, kAll };

Split split_from_string(std::string_view s);

// Deterministic 70/30 assignment from the record id and seed.
bool in_train_split(const std::string& record_id, std::uint64_t seed);

struct Options {
  std::filesystem::path dataset;
  DatasetFormat format = DatasetFormat::kGenericJsonl;
  std::optional<std::filesystem::path> config;
  std::filesystem::path cache = "cache/samples.jsonl";
  std::filesystem::path out = "out";
  // "mock:<script.json>", or an http(s) URL. Empty falls back to
  // GEN_BASE_URL / NLI_BASE_URL.
  std::string backend_url;
  // "mock:equality", "mock:<table.json>", or an http(s) URL.
  std::string nli_url;
  int jobs = 1;
  std::optional<std::uint64_t> seed;  // training and split seed
  bool ablation_no_gc = false;
  bool no_clustering = false;
  std::optional<GcVariant> gc;
  std::optional<int> n;
  Split split = Split::kTest;
  std::optional<std::filesystem::path> params;  // overrides the default params path
  std::optional<std::filesystem::path> labels;  // overrides <out>/labels.csv
  std::ostream* log = nullptr;                  // progress messages
};

// Effective configuration: config file, then command-line overrides.
CruxConfig resolve_config(const Options& opts);

// Default fusion params file inside the output directory; the no-gc
// ablation gets its own file.
std::filesystem::path params_path(const Options& opts);
std::filesystem::path labels_path(const Options& opts);

std::unique_ptr<GenerationBackend> make_generation_backend(const std::string& url,
                                                           const CruxConfig& cfg,
                                                           std::shared_ptr<InflightLimiter> limiter);
std::unique_ptr<EntailmentBackend> make_entailment_backend(const std::string& url,
                                                           std::shared_ptr<InflightLimiter> limiter);

// Writes <out>/dataset.jsonl and <out>/gen_script.json for the synthetic
// three-regime suite.
void cmd_synth(const std::filesystem::path& out, std::size_t records, int n, std::uint64_t seed);

struct SampleSummary {
  std::size_t records = 0;
  std::size_t backend_calls = 0;
  std::size_t cache_hits = 0;
};

SampleSummary cmd_sample(const Options& opts);
void cmd_label(const Options& opts);
FusionParams cmd_train(const Options& opts);
void cmd_score(const Options& opts);

struct MethodResult {
  std::string method;
  double auroc = 0.0;
};

std::vector<MethodResult> cmd_eval(const Options& opts);

// sample -> label -> train -> score -> eval.
std::vector<MethodResult> cmd_all(const Options& opts);

// Scores CSV column order.
const std::vector<std::string>& score_columns();

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

}  // namespace crux::app
