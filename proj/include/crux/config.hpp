#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>

#include "crux/consistency.hpp"
#include "crux/fusion.hpp"
#include "crux/prompt.hpp"
#include "crux/types.hpp"

namespace crux {

// Which answers the graph baselines (degree, eccentricity, eigenvalue) see.
enum class BaselineGraph { kWithContext, kPooled };

struct CruxConfig {
  int n = 10;
  double entail_threshold = 0.5;
  bool use_clustering = true;
  bool use_gc = true;
  GcVariant gc_variant = GcVariant::kPairwise;
  DecodingParams decoding;
  PromptTemplate templates;
  BaselineGraph baseline_graph = BaselineGraph::kWithContext;
  int max_inflight = 4;
  std::string model = "default";
  TrainHyper train;
  // Fusion head; without one, reports carry no fused confidence.
  std::shared_ptr<const FusionParams> fusion;

  void validate() const;
  std::size_t feature_count() const { return use_gc ? 2 : 1; }

  // Key/value snapshot of everything except the fusion head.
  std::map<std::string, std::string> to_map() const;
};

// Parses "key = value" lines; '#' starts a comment, blank lines are ignored.
// Template values accept \n and \t escapes. Unknown keys are ConfigInvalid.
CruxConfig parse_config(std::string_view text, CruxConfig base = {});
CruxConfig load_config(const std::filesystem::path& path, CruxConfig base = {});

// Serializes to_map() in the format parse_config reads.
std::string render_config(const CruxConfig& cfg);

}  // namespace crux
