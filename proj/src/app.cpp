#include "crux/app.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "crux/baselines.hpp"
#include "crux/error.hpp"
#include "crux/http_backends.hpp"
#include "crux/pipeline.hpp"
#include "crux/sample_cache.hpp"
#include "crux/synthetic.hpp"
#include "crux/text.hpp"

namespace crux::app {

namespace fs = std::filesystem;
using nlohmann::json;

Split split_from_string(std::string_view s) {
  if (s == "test") return Split::kTest;
  if (s == "train") return Split::kTrain;
  if (s == "all") return Split::kAll;
  throw Error(ErrorCode::kConfigInvalid, "split must be test, train or all");
}

bool in_train_split(const std::string& record_id, std::uint64_t seed) {
  const std::uint64_t h = fnv1a64(record_id, 0xcbf29ce484222325ULL ^ (seed * 0x9e3779b97f4a7c15ULL));
  return h % 100 < 70;
}

namespace {

bool selected(const std::string& id, Split split, std::uint64_t seed) {
  switch (split) {
    case Split::kAll: return true;
    case Split::kTrain: return in_train_split(id, seed);
    case Split::kTest: return !in_train_split(id, seed);
  }
  return true;
}

std::string_view split_name(Split s) {
  switch (s) {
    case Split::kTest: return "test";
    case Split::kTrain: return "train";
    case Split::kAll: return "all";
  }
  return "all";
}

void log_line(const Options& opts, const std::string& msg) {
  if (opts.log) *opts.log << msg << '\n';
}

std::string env_or(const char* name, const std::string& fallback) {
  if (!fallback.empty()) return fallback;
  const char* v = std::getenv(name);
  return v ? std::string(v) : std::string();
}

std::string generation_url(const Options& opts) { return env_or("GEN_BASE_URL", opts.backend_url); }
std::string nli_url(const Options& opts) { return env_or("NLI_BASE_URL", opts.nli_url); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

class CsvWriter {
 public:
  explicit CsvWriter(const fs::path& path) : path_(path), out_(path, std::ios::trunc) {
    if (!out_) throw Error(ErrorCode::kFileUnreadable, "cannot write " + path.string());
  }

  void row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out_ << ',';
      out_ << csv_field(fields[i]);
    }
    out_ << '\n';
  }

  ~CsvWriter() { out_.flush(); }

 private:
  fs::path path_;
  std::ofstream out_;
};

// Runs fn(i) for i in [0, count) on up to `jobs` threads; the first
// exception is rethrown after all workers stop.
template <typename Fn>
void parallel_for(std::size_t count, int jobs, Fn fn) {
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(count, jobs));
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mu;
  auto work = [&] {
    while (!failed.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
}

struct Context {
  CruxConfig cfg;
  std::vector<QuestionRecord> records;
  std::shared_ptr<InflightLimiter> limiter;
  std::unique_ptr<GenerationBackend> gen;
  std::unique_ptr<EntailmentBackend> nli;
  std::unique_ptr<SampleCache> cache;
};

void write_manifest(const Options& opts, const Context& ctx, std::string_view command) {
  fs::create_directories(opts.out);
  json manifest = {
      {"command", command},
      {"config", ctx.cfg.to_map()},
      {"dataset", opts.dataset.string()},
      {"format", opts.format == DatasetFormat::kSquadJson   ? "squad"
                 : opts.format == DatasetFormat::kCoqaJson ? "coqa"
                                                             : "jsonl"},
      {"generation_backend", ctx.gen ? ctx.gen->identity() : generation_url(opts)},
      {"nli_backend", nli_url(opts)},
      {"cache", opts.cache.string()},
      {"out", opts.out.string()},
      {"seed", ctx.cfg.train.seed},
      {"ablation", opts.ablation_no_gc ? "no-gc" : "none"},
      {"split", split_name(opts.split)},
      {"params", params_path(opts).string()},
  };
  std::ofstream out(opts.out / ("manifest_" + std::string(command) + ".json"), std::ios::trunc);
  out << manifest.dump(2) << '\n';
}

Context open_context(const Options& opts, bool need_generation, bool need_nli) {
  Context ctx;
  ctx.cfg = resolve_config(opts);
  LoadStats stats;
  ctx.records = load_dataset(opts.dataset, opts.format, &stats);
  if (stats.skipped > 0) {
    log_line(opts, "skipped " + std::to_string(stats.skipped) + " malformed item(s) in " +
                       opts.dataset.string());
  }
  ctx.limiter = std::make_shared<InflightLimiter>(ctx.cfg.max_inflight);
  if (need_generation) {
    ctx.gen = make_generation_backend(generation_url(opts), ctx.cfg, ctx.limiter);
    ctx.cache = std::make_unique<SampleCache>(opts.cache);
    for (const auto& issue : ctx.cache->issues()) {
      log_line(opts, "cache " + opts.cache.string() + " line " + std::to_string(issue.line) +
                         " is corrupt and was ignored: " + issue.message);
    }
  }
  if (need_nli) ctx.nli = make_entailment_backend(nli_url(opts), ctx.limiter);
  return ctx;
}

std::map<std::string, int> read_labels(const fs::path& path) {
  const CsvTable t = read_csv(path);
  const std::size_t id_col = t.column("record_id");
  const std::size_t label_col = t.column("label");
  std::map<std::string, int> labels;
  for (const auto& row : t.rows) labels[row.at(id_col)] = std::stoi(row.at(label_col));
  return labels;
}

std::vector<ConfidenceReport> compute_reports(const Options& opts, Context& ctx,
                                              const std::vector<const QuestionRecord*>& records) {
  ContrastiveSampler sampler(*ctx.gen, ctx.cache.get());
  std::vector<ConfidenceReport> reports(records.size());
  parallel_for(records.size(), opts.jobs, [&](std::size_t i) {
    reports[i] = run_crux(*records[i], ctx.cfg, sampler, *ctx.nli);
  });
  log_line(opts, "scored " + std::to_string(records.size()) + " record(s): " +
                     std::to_string(sampler.backend_calls()) + " backend call(s), " +
                     std::to_string(sampler.cache_hits()) + " cache hit(s)");
  return reports;
}

}  // namespace

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw Error(ErrorCode::kSchemaMismatch, "CSV has no column '" + name + "'");
}

CsvTable read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kFileUnreadable, "cannot open " + path.string());
  CsvTable t;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char c = line[i];
      if (quoted) {
        if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else if (c == '"') {
          quoted = false;
        } else {
          cur += c;
        }
      } else if (c == '"') {
        quoted = true;
      } else if (c == ',') {
        fields.push_back(std::move(cur));
        cur.clear();
      } else {
        cur += c;
      }
    }
    fields.push_back(std::move(cur));
    if (first) {
      t.header = std::move(fields);
      first = false;
    } else {
      t.rows.push_back(std::move(fields));
    }
  }
  return t;
}

const std::vector<std::string>& score_columns() {
  static const std::vector<std::string> cols = [] {
    std::vector<std::string> c = {"record_id", "delta_h", "gc"};
    for (auto k : kAllBaselines) c.emplace_back(to_string(k));
    c.emplace_back("conf");
    return c;
  }();
  return cols;
}

CruxConfig resolve_config(const Options& opts) {
  CruxConfig cfg = opts.config ? load_config(*opts.config) : CruxConfig{};
  if (opts.n) cfg.n = *opts.n;
  if (opts.gc) cfg.gc_variant = *opts.gc;
  if (opts.no_clustering) cfg.use_clustering = false;
  if (opts.ablation_no_gc) cfg.use_gc = false;
  if (opts.seed) cfg.train.seed = *opts.seed;
  cfg.validate();
  return cfg;
}

fs::path params_path(const Options& opts) {
  if (opts.params) return *opts.params;
  return opts.out / (opts.ablation_no_gc ? "fusion_params_no-gc.json" : "fusion_params.json");
}

fs::path labels_path(const Options& opts) {
  return opts.labels ? *opts.labels : opts.out / "labels.csv";
}

std::unique_ptr<GenerationBackend> make_generation_backend(const std::string& url,
                                                           const CruxConfig& cfg,
                                                           std::shared_ptr<InflightLimiter> limiter) {
  if (url.empty()) {
    throw Error(ErrorCode::kConfigInvalid, "no generation backend (--backend-url or GEN_BASE_URL)");
  }
  if (url.rfind("mock:", 0) == 0) return ScriptedGenerationBackend::from_file(url.substr(5));
  HttpGenerationBackend::Options o;
  o.base_url = url;
  o.model = cfg.model;
  if (const char* key = std::getenv("GEN_API_KEY"); key && *key) o.api_key = key;
  return std::make_unique<HttpGenerationBackend>(std::move(o), std::move(limiter));
}

std::unique_ptr<EntailmentBackend> make_entailment_backend(const std::string& url,
                                                           std::shared_ptr<InflightLimiter> limiter) {
  if (url.empty()) throw Error(ErrorCode::kConfigInvalid, "no NLI backend (--nli-url or NLI_BASE_URL)");
  if (url == "mock:equality") return std::make_unique<EqualityEntailmentBackend>();
  if (url.rfind("mock:", 0) == 0) return TableEntailmentBackend::from_file(url.substr(5));
  return std::make_unique<HttpEntailmentBackend>(HttpEntailmentBackend::Options{url, {}},
                                                 std::move(limiter));
}

void cmd_synth(const fs::path& out, std::size_t records, int n, std::uint64_t seed) {
  const SyntheticSuite suite = make_synthetic_suite(records, n, seed);
  fs::create_directories(out);
  std::ofstream data(out / "dataset.jsonl", std::ios::trunc);
  if (!data) throw Error(ErrorCode::kFileUnreadable, "cannot write " + (out / "dataset.jsonl").string());
  for (const auto& r : suite.records) data << to_generic_jsonl(r) << '\n';
  std::ofstream script(out / "gen_script.json", std::ios::trunc);
  script << json(suite.script).dump(2) << '\n';
}

SampleSummary cmd_sample(const Options& opts) {
  Context ctx = open_context(opts, true, false);
  write_manifest(opts, ctx, "sample");
  ContrastiveSampler sampler(*ctx.gen, ctx.cache.get());
  std::atomic<std::size_t> failures{0};
  parallel_for(ctx.records.size(), opts.jobs, [&](std::size_t i) {
    for (auto c : {Condition::kWithContext, Condition::kContextFree}) {
      try {
        sampler.sample(ctx.records[i], c, ctx.cfg);
      } catch (const Error&) {
        ++failures;
        throw;
      }
    }
  });
  SampleSummary s{ctx.records.size(), sampler.backend_calls(), sampler.cache_hits()};
  log_line(opts, "sampled " + std::to_string(s.records) + " record(s): " +
                     std::to_string(s.backend_calls) + " backend call(s), " +
                     std::to_string(s.cache_hits) + " cache hit(s), " +
                     std::to_string(failures.load()) + " failure(s)");
  return s;
}

void cmd_label(const Options& opts) {
  Context ctx = open_context(opts, true, true);
  write_manifest(opts, ctx, "label");
  ContrastiveSampler sampler(*ctx.gen, ctx.cache.get());
  std::vector<CorrectnessLabel> labels(ctx.records.size());
  parallel_for(ctx.records.size(), opts.jobs, [&](std::size_t i) {
    const AnswerSet gens = sampler.sample(ctx.records[i], Condition::kWithContext, ctx.cfg);
    labels[i] = label_record(gens, ctx.records[i].reference_answer, *ctx.nli);
  });
  CsvWriter csv(labels_path(opts));
  csv.row({"record_id", "label", "votes_for", "votes_total"});
  std::size_t positives = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    positives += static_cast<std::size_t>(labels[i].value);
    csv.row({ctx.records[i].id, std::to_string(labels[i].value),
             std::to_string(labels[i].votes_for), std::to_string(labels[i].votes_total)});
  }
  log_line(opts, "labeled " + std::to_string(labels.size()) + " record(s), " +
                     std::to_string(positives) + " correct");
}

FusionParams cmd_train(const Options& opts) {
  Context ctx = open_context(opts, true, true);
  write_manifest(opts, ctx, "train");
  const auto labels = read_labels(labels_path(opts));
  std::vector<const QuestionRecord*> train;
  std::vector<int> train_labels;
  for (const auto& r : ctx.records) {
    auto it = labels.find(r.id);
    if (it == labels.end() || !in_train_split(r.id, ctx.cfg.train.seed)) continue;
    train.push_back(&r);
    train_labels.push_back(it->second);
  }
  const auto reports = compute_reports(opts, ctx, train);
  std::vector<TrainExample> examples;
  examples.reserve(reports.size());
  for (std::size_t i = 0; i < reports.size(); ++i) {
    examples.push_back({reports[i].features(ctx.cfg.use_gc), train_labels[i]});
  }
  FusionParams params = mlp_train(examples, ctx.cfg.train);
  params.save(params_path(opts));
  log_line(opts, "trained " + std::to_string(params.features) + "-feature fusion head on " +
                     std::to_string(examples.size()) + " record(s), loss " +
                     format_double(params.loss));
  return params;
}

void cmd_score(const Options& opts) {
  Context ctx = open_context(opts, true, true);
  const fs::path pp = params_path(opts);
  if (fs::exists(pp)) {
    ctx.cfg.fusion = std::make_shared<const FusionParams>(FusionParams::load(pp));
  } else {
    log_line(opts, "no fusion params at " + pp.string() + "; conf column left empty");
  }
  write_manifest(opts, ctx, "score");
  std::vector<const QuestionRecord*> all;
  for (const auto& r : ctx.records) all.push_back(&r);
  const auto reports = compute_reports(opts, ctx, all);

  CsvWriter csv(opts.out / "scores.csv");
  csv.row(score_columns());
  for (const auto& rep : reports) {
    std::vector<std::string> row = {rep.record_id, format_double(rep.delta_h), format_double(rep.gc)};
    for (auto k : kAllBaselines) row.push_back(format_double(rep.baseline_scores.at(std::string(to_string(k)))));
    row.push_back(rep.fused_confidence ? format_double(*rep.fused_confidence) : "");
    csv.row(row);
  }
}

std::vector<MethodResult> cmd_eval(const Options& opts) {
  const CruxConfig cfg = resolve_config(opts);
  {
    Context ctx;
    ctx.cfg = cfg;
    write_manifest(opts, ctx, "eval");
  }
  const CsvTable scores = read_csv(opts.out / "scores.csv");
  const auto labels = read_labels(labels_path(opts));
  const std::size_t id_col = scores.column("record_id");

  std::vector<const std::vector<std::string>*> rows;
  std::vector<int> y;
  for (const auto& row : scores.rows) {
    const std::string& id = row.at(id_col);
    auto it = labels.find(id);
    if (it == labels.end() || !selected(id, opts.split, cfg.train.seed)) continue;
    rows.push_back(&row);
    y.push_back(it->second);
  }

  struct Method {
    std::string name;
    std::size_t col;
  };
  std::vector<Method> methods;
  const std::size_t conf_col = scores.column("conf");
  bool has_conf = !rows.empty();
  for (const auto* row : rows) has_conf = has_conf && !row->at(conf_col).empty();
  if (has_conf) methods.push_back({opts.ablation_no_gc ? "crux_no_gc" : "crux", conf_col});
  for (auto k : kAllBaselines) methods.push_back({std::string(to_string(k)), scores.column(std::string(to_string(k)))});

  const std::string dataset = opts.dataset.stem().string();
  CsvWriter evaluation(opts.out / "evaluation.csv");
  evaluation.row({"record_id", "method_name", "score", "label"});
  CsvWriter summary(opts.out / "summary.csv");
  summary.row({"method_name", "dataset", "auroc"});

  std::vector<MethodResult> results;
  for (const auto& m : methods) {
    std::vector<double> s;
    s.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      s.push_back(std::stod(rows[i]->at(m.col)));
      evaluation.row({rows[i]->at(id_col), m.name, rows[i]->at(m.col), std::to_string(y[i])});
    }
    const double area = auroc(s, y);
    const RocCurve curve = roc_points(s, y);
    summary.row({m.name, dataset, format_double(area)});
    CsvWriter roc(opts.out / ("roc_" + m.name + ".csv"));
    roc.row({"method_name", "fpr", "tpr"});
    for (const auto& [fpr, tpr] : curve.points) roc.row({m.name, format_double(fpr), format_double(tpr)});
    results.push_back({m.name, area});
    log_line(opts, m.name + " AUROC " + format_double(area));
  }
  return results;
}

std::vector<MethodResult> cmd_all(const Options& opts) {
  cmd_sample(opts);
  cmd_label(opts);
  cmd_train(opts);
  cmd_score(opts);
  return cmd_eval(opts);
}

}  // namespace crux::app
