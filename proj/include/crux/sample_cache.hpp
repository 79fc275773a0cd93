#pragma once

#include <cstddef>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "crux/types.hpp"

namespace crux {

struct CacheKey {
  std::string record_id;
  Condition condition = Condition::kWithContext;
  std::string prompt_fingerprint;
  DecodingParams decoding;
  std::string backend;

  std::string canonical() const;
  bool operator==(const CacheKey&) const = default;
};

struct SampleCacheEntry {
  CacheKey key;
  std::vector<std::string> answers;
  std::string timestamp;  // ISO-8601 UTC

  nlohmann::json to_json() const;
  static SampleCacheEntry from_json(const nlohmann::json& j);
  bool operator==(const SampleCacheEntry&) const = default;
};

struct CacheIssue {
  std::size_t line = 0;
  std::string message;
};

// Append-only JSONL file of generation results. The file is read once on
// construction (absent means empty); appends take an exclusive file lock,
// write one line, and sync it to disk before returning.
class SampleCache {
 public:
  explicit SampleCache(std::filesystem::path path);

  // First entry matching the full key.
  std::optional<AnswerSet> lookup(const CacheKey& key) const;
  void append(const SampleCacheEntry& entry);

  std::size_t size() const;
  const std::vector<CacheIssue>& issues() const { return issues_; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  mutable std::mutex mu_;
  std::vector<SampleCacheEntry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<CacheIssue> issues_;
};

std::string utc_timestamp();

}  // namespace crux
