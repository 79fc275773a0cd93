#include "crux/dataset.hpp"

#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "crux/error.hpp"
#include "crux/text.hpp"

namespace crux {

using nlohmann::json;

DatasetFormat dataset_format_from_string(std::string_view s) {
  if (s == "squad") return DatasetFormat::kSquadJson;
  if (s == "coqa") return DatasetFormat::kCoqaJson;
  if (s == "jsonl" || s == "generic") return DatasetFormat::kGenericJsonl;
  throw Error(ErrorCode::kConfigInvalid, "unknown dataset format '" + std::string(s) + "'");
}

namespace {

class Collector {
 public:
  explicit Collector(LoadStats* stats) : stats_(stats) {}

  void add(QuestionRecord r) {
    std::string problem;
    if (r.id.empty()) {
      problem = "missing id";
    } else if (r.query.empty()) {
      problem = "empty question";
    } else if (r.context.empty() && !r.context_free) {
      problem = "empty context";
    } else if (!ids_.insert(r.id).second) {
      problem = "duplicate id";
    }
    if (!problem.empty()) {
      skip(problem + (r.id.empty() ? "" : " (" + r.id + ")"));
      return;
    }
    records_.push_back(std::move(r));
  }

  void skip(const std::string& why) {
    ++skipped_;
    if (stats_) stats_->warnings.push_back(why);
  }

  std::vector<QuestionRecord> finish(const std::filesystem::path& path) {
    if (stats_) {
      stats_->loaded = records_.size();
      stats_->skipped = skipped_;
    }
    if (records_.empty()) {
      throw Error(ErrorCode::kSchemaMismatch, "no valid records in " + path.string());
    }
    return std::move(records_);
  }

 private:
  LoadStats* stats_;
  std::vector<QuestionRecord> records_;
  std::unordered_set<std::string> ids_;
  std::size_t skipped_ = 0;
};

std::string string_field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) return {};
  return it->get<std::string>();
}

json parse_whole_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kFileUnreadable, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchemaMismatch, path.string() + ": " + e.what());
  }
}

void load_squad(const json& root, Collector& out) {
  if (!root.is_object() || !root.contains("data") || !root["data"].is_array()) {
    return;
  }
  for (const auto& article : root["data"]) {
    if (!article.contains("paragraphs") || !article["paragraphs"].is_array()) {
      out.skip("article without paragraphs");
      continue;
    }
    for (const auto& para : article["paragraphs"]) {
      const std::string context = string_field(para, "context");
      if (!para.contains("qas") || !para["qas"].is_array()) {
        out.skip("paragraph without qas");
        continue;
      }
      for (const auto& qa : para["qas"]) {
        if (qa.value("is_impossible", false)) {
          out.skip("unanswerable question " + string_field(qa, "id"));
          continue;
        }
        std::string answer;
        if (qa.contains("answers") && qa["answers"].is_array() && !qa["answers"].empty()) {
          answer = string_field(qa["answers"][0], "text");
        }
        if (answer.empty()) {
          out.skip("question without answer " + string_field(qa, "id"));
          continue;
        }
        QuestionRecord r;
        r.id = string_field(qa, "id");
        r.query = trim(string_field(qa, "question"));
        r.context = context;
        r.reference_answer = answer;
        r.source_dataset = SourceDataset::kSquad;
        r.answerable = true;
        out.add(std::move(r));
      }
    }
  }
}

std::string turn_key(const json& turn) {
  auto it = turn.find("turn_id");
  if (it == turn.end()) return {};
  return it->is_string() ? it->get<std::string>() : it->dump();
}

void load_coqa(const json& root, Collector& out) {
  if (!root.is_object() || !root.contains("data") || !root["data"].is_array()) return;
  for (const auto& story : root["data"]) {
    const std::string story_id = string_field(story, "id");
    const std::string context = string_field(story, "story");
    if (!story.contains("questions") || !story.contains("answers")) {
      out.skip("story without questions/answers " + story_id);
      continue;
    }
    std::unordered_map<std::string, std::string> answers;
    for (const auto& a : story["answers"]) answers[turn_key(a)] = string_field(a, "input_text");
    for (const auto& q : story["questions"]) {
      const std::string turn = turn_key(q);
      auto it = answers.find(turn);
      if (it == answers.end() || it->second.empty()) {
        out.skip("turn without answer " + story_id + "_" + turn);
        continue;
      }
      QuestionRecord r;
      r.id = story_id + "_" + turn;
      r.query = trim(string_field(q, "input_text"));
      r.context = context;
      r.reference_answer = it->second;
      r.source_dataset = SourceDataset::kCoqa;
      out.add(std::move(r));
    }
  }
}

void load_generic(const std::filesystem::path& path, Collector& out) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kFileUnreadable, "cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception&) {
      out.skip("line " + std::to_string(line_no) + ": not JSON");
      continue;
    }
    if (!j.is_object()) {
      out.skip("line " + std::to_string(line_no) + ": not an object");
      continue;
    }
    QuestionRecord r;
    r.id = string_field(j, "id");
    r.query = trim(string_field(j, "question"));
    r.context = string_field(j, "context");
    r.reference_answer = string_field(j, "answer");
    r.source_dataset = SourceDataset::kGeneric;
    r.question_kind = string_field(j, "kind");
    if (auto it = j.find("tags"); it != j.end() && it->is_array()) {
      for (const auto& t : *it) {
        if (t.is_string()) r.tags.push_back(t.get<std::string>());
      }
    }
    if (auto it = j.find("answerable"); it != j.end() && it->is_boolean()) {
      r.answerable = it->get<bool>();
    }
    r.context_free = j.value("context_free", false);
    if (r.reference_answer.empty()) {
      out.skip("line " + std::to_string(line_no) + ": missing answer");
      continue;
    }
    out.add(std::move(r));
  }
}

}  // namespace

std::vector<QuestionRecord> load_dataset(const std::filesystem::path& path, DatasetFormat format,
                                         LoadStats* stats) {
  Collector out(stats);
  switch (format) {
    case DatasetFormat::kSquadJson: load_squad(parse_whole_file(path), out); break;
    case DatasetFormat::kCoqaJson: load_coqa(parse_whole_file(path), out); break;
    case DatasetFormat::kGenericJsonl: load_generic(path, out); break;
  }
  return out.finish(path);
}

std::string to_generic_jsonl(const QuestionRecord& r) {
  json j = {{"id", r.id}, {"question", r.query}, {"context", r.context}, {"answer", r.reference_answer}};
  if (!r.tags.empty()) j["tags"] = r.tags;
  if (!r.question_kind.empty()) j["kind"] = r.question_kind;
  if (r.answerable) j["answerable"] = *r.answerable;
  if (r.context_free) j["context_free"] = true;
  return j.dump();
}

void FilterRules::validate() const {
  if (min_context_words && max_context_words && *min_context_words > *max_context_words) {
    throw Error(ErrorCode::kConfigInvalid, "min_context_words exceeds max_context_words");
  }
}

std::vector<QuestionRecord> filter_records(const std::vector<QuestionRecord>& records,
                                           const FilterRules& rules) {
  rules.validate();
  std::vector<QuestionRecord> out;
  for (const auto& r : records) {
    const std::size_t words = word_count(r.context);
    if (rules.min_context_words && words < *rules.min_context_words) continue;
    if (rules.max_context_words && words > *rules.max_context_words) continue;
    if (!rules.allowed_kinds.empty() && !rules.allowed_kinds.count(r.question_kind)) continue;
    if (rules.require_answerable && r.answerable != true) continue;
    out.push_back(r);
  }
  return out;
}

}  // namespace crux
