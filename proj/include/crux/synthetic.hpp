#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "crux/prompt.hpp"
#include "crux/types.hpp"

namespace crux {

// Answer-generation behaviours of the synthetic suite:
//   context-informative: the context collapses otherwise scattered answers
//     onto the reference (high entropy reduction, correct);
//   knowledge-sufficient: the model answers correctly with or without the
//     context (both entropies low, correct);
//   model-uncertain: answers scatter with and without the context and miss
//     the reference (both entropies high, incorrect).
enum class SyntheticRegime { kContextInformative, kKnowledgeSufficient, kModelUncertain };

std::string_view to_string(SyntheticRegime r);

struct SyntheticSuite {
  std::vector<QuestionRecord> records;
  std::vector<SyntheticRegime> regimes;  // parallel to records
  // Prompt fingerprint -> scripted answers, ready for ScriptedGenerationBackend.
  std::map<std::string, std::vector<std::string>> script;
};

// Records cycle through the three regimes; every random choice comes from
// `seed`. Prompts are built with `templates`, so the script only matches a
// run using the same templates.
SyntheticSuite make_synthetic_suite(std::size_t records = 60, int n = 10, std::uint64_t seed = 7,
                                    const PromptTemplate& templates = {});

}  // namespace crux
