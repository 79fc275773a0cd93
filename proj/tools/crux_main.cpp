#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "crux/app.hpp"
#include "crux/error.hpp"

namespace {

using crux::app::Options;

struct Flags {
  std::string dataset;
  std::string format = "jsonl";
  std::string config;
  std::string cache = "cache/samples.jsonl";
  std::string out = "out";
  std::string backend_url;
  std::string nli_url;
  int jobs = 1;
  std::uint64_t seed = 0;
  std::string ablation = "none";
  bool no_clustering = false;
  std::string gc;
  int n = 0;
  std::string split = "test";
  std::string params;
  std::string labels;
};

void add_pipeline_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--dataset", f.dataset, "Dataset file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--format", f.format, "squad | coqa | jsonl")
      ->check(CLI::IsMember({"squad", "coqa", "jsonl", "generic"}));
  cmd->add_option("--config", f.config, "key = value configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--cache", f.cache, "Sample cache (JSONL)");
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_option("--backend-url", f.backend_url, "Generation backend: http(s) URL or mock:<script.json>");
  cmd->add_option("--nli-url", f.nli_url, "NLI backend: http(s) URL, mock:equality or mock:<table.json>");
  cmd->add_option("--jobs", f.jobs, "Records processed in parallel")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", f.seed, "Training and split seed");
  cmd->add_option("--ablation", f.ablation, "none | no-gc")->check(CLI::IsMember({"none", "no-gc"}));
  cmd->add_flag("--no-clustering", f.no_clustering, "Group answers by exact normalized text");
  cmd->add_option("--gc", f.gc, "pairwise | center")->check(CLI::IsMember({"pairwise", "center"}));
  cmd->add_option("--n", f.n, "Samples per condition")->check(CLI::PositiveNumber);
  cmd->add_option("--split", f.split, "Records evaluated: test | train | all")
      ->check(CLI::IsMember({"test", "train", "all"}));
  cmd->add_option("--params", f.params, "Fusion params file");
  cmd->add_option("--labels", f.labels, "Labels CSV");
}

Options to_options(const Flags& f, const CLI::App* cmd) {
  Options o;
  o.dataset = f.dataset;
  o.format = crux::dataset_format_from_string(f.format);
  if (!f.config.empty()) o.config = f.config;
  o.cache = f.cache;
  o.out = f.out;
  o.backend_url = f.backend_url;
  o.nli_url = f.nli_url;
  o.jobs = f.jobs;
  if (cmd->count("--seed")) o.seed = f.seed;
  o.ablation_no_gc = f.ablation == "no-gc";
  o.no_clustering = f.no_clustering;
  if (!f.gc.empty()) o.gc = crux::gc_variant_from_string(f.gc);
  if (cmd->count("--n")) o.n = f.n;
  o.split = crux::app::split_from_string(f.split);
  if (!f.params.empty()) o.params = f.params;
  if (!f.labels.empty()) o.labels = f.labels;
  o.log = &std::cerr;
  return o;
}

void print_results(const std::vector<crux::app::MethodResult>& results) {
  for (const auto& r : results) std::cout << r.method << '\t' << r.auroc << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contextual confidence estimation for question answering"};
  app.require_subcommand(1);

  std::string synth_out = "synthetic";
  std::size_t synth_records = 60;
  int synth_n = 10;
  std::uint64_t synth_seed = 7;
  auto* synth = app.add_subcommand("synth", "Write the synthetic three-regime suite");
  synth->add_option("--out", synth_out, "Output directory");
  synth->add_option("--records", synth_records, "Number of records");
  synth->add_option("--n", synth_n, "Answers per condition");
  synth->add_option("--seed", synth_seed, "Generator seed");

  std::map<std::string, Flags> flags;
  std::map<std::string, CLI::App*> commands;
  const std::map<std::string, std::string> descriptions = {
      {"sample", "Draw and cache answers with and without context"},
      {"label", "Majority-vote correctness labels against the references"},
      {"train", "Fit the fusion head on the training split"},
      {"score", "Confidence scores and baselines for every record"},
      {"eval", "AUROC and ROC curves per method"},
      {"all", "sample, label, train, score and eval in sequence"},
  };
  for (const auto& [name, desc] : descriptions) {
    commands[name] = app.add_subcommand(name, desc);
    add_pipeline_flags(commands[name], flags[name]);
  }

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) {
      crux::app::cmd_synth(synth_out, synth_records, synth_n, synth_seed);
      std::cerr << "wrote " << synth_records << " synthetic record(s) to " << synth_out << '\n';
      return 0;
    }
    for (const auto& [name, cmd] : commands) {
      if (!cmd->parsed()) continue;
      const Options opts = to_options(flags[name], cmd);
      if (name == "sample") {
        crux::app::cmd_sample(opts);
      } else if (name == "label") {
        crux::app::cmd_label(opts);
      } else if (name == "train") {
        crux::app::cmd_train(opts);
      } else if (name == "score") {
        crux::app::cmd_score(opts);
      } else if (name == "eval") {
        print_results(crux::app::cmd_eval(opts));
      } else {
        print_results(crux::app::cmd_all(opts));
      }
    }
  } catch (const crux::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
