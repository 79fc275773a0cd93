#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace crux {

enum class SourceDataset { kSquad, kCoqa, kGeneric };

std::string_view to_string(SourceDataset d);

struct QuestionRecord {
  std::string id;
  std::string query;
  std::string context;
  std::string reference_answer;
  SourceDataset source_dataset = SourceDataset::kGeneric;

  // Optional metadata consulted by record filters.
  std::vector<std::string> tags;
  std::string question_kind;
  std::optional<bool> answerable;
  // Only records flagged this way may carry an empty context; CRUX scoring
  // rejects them.
  bool context_free = false;
};

enum class Condition { kWithContext, kContextFree };

std::string_view to_string(Condition c);
Condition condition_from_string(std::string_view s);

struct DecodingParams {
  double temperature = 1.0;
  int max_tokens = 64;
  std::optional<std::int64_t> seed;

  void validate() const;
  bool operator==(const DecodingParams&) const = default;
};

struct AnswerSet {
  Condition condition = Condition::kWithContext;
  std::vector<std::string> answers;  // generation order
  DecodingParams decoding;
  std::string prompt_fingerprint;

  std::size_t size() const { return answers.size(); }
};

}  // namespace crux
