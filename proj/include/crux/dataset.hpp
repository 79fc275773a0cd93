#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "crux/types.hpp"

namespace crux {

enum class DatasetFormat { kSquadJson, kCoqaJson, kGenericJsonl };

DatasetFormat dataset_format_from_string(std::string_view s);  // squad | coqa | jsonl

struct LoadStats {
  std::size_t loaded = 0;
  std::size_t skipped = 0;
  std::vector<std::string> warnings;
};

// Malformed items are skipped and counted in `stats`; a file yielding no
// valid record is a SchemaMismatch.
std::vector<QuestionRecord> load_dataset(const std::filesystem::path& path, DatasetFormat format,
                                         LoadStats* stats = nullptr);

// One GenericJsonl line: {"id","question","context","answer"} plus optional
// "tags" (array of strings), "kind", "answerable" (bool) and "context_free"
// (bool).
std::string to_generic_jsonl(const QuestionRecord& r);

struct FilterRules {
  std::optional<std::size_t> min_context_words;
  std::optional<std::size_t> max_context_words;
  std::set<std::string> allowed_kinds;  // empty: any kind
  bool require_answerable = false;

  void validate() const;
};

// Order-preserving subset; word counts are whitespace-token counts.
std::vector<QuestionRecord> filter_records(const std::vector<QuestionRecord>& records,
                                           const FilterRules& rules);

}  // namespace crux
