#include "crux/sample_cache.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <ctime>
#include <fstream>

#include "crux/error.hpp"
#include "crux/text.hpp"

namespace crux {

using nlohmann::json;

namespace {

json decoding_to_json(const DecodingParams& d) {
  json j = {{"temperature", d.temperature}, {"max_tokens", d.max_tokens}};
  j["seed"] = d.seed ? json(*d.seed) : json(nullptr);
  return j;
}

DecodingParams decoding_from_json(const json& j) {
  DecodingParams d;
  d.temperature = j.at("temperature").get<double>();
  d.max_tokens = j.at("max_tokens").get<int>();
  if (j.contains("seed") && !j.at("seed").is_null()) d.seed = j.at("seed").get<std::int64_t>();
  return d;
}

}  // namespace

std::string CacheKey::canonical() const {
  std::string s = record_id;
  s += '\x1f';
  s += to_string(condition);
  s += '\x1f';
  s += prompt_fingerprint;
  s += '\x1f';
  s += format_double(decoding.temperature);
  s += '\x1f';
  s += std::to_string(decoding.max_tokens);
  s += '\x1f';
  s += decoding.seed ? std::to_string(*decoding.seed) : "-";
  s += '\x1f';
  s += backend;
  return s;
}

json SampleCacheEntry::to_json() const {
  return {
      {"record_id", key.record_id},
      {"condition", to_string(key.condition)},
      {"prompt_fingerprint", key.prompt_fingerprint},
      {"decoding", decoding_to_json(key.decoding)},
      {"answers", answers},
      {"backend", key.backend},
      {"timestamp", timestamp},
  };
}

SampleCacheEntry SampleCacheEntry::from_json(const json& j) {
  SampleCacheEntry e;
  e.key.record_id = j.at("record_id").get<std::string>();
  e.key.condition = condition_from_string(j.at("condition").get<std::string>());
  e.key.prompt_fingerprint = j.at("prompt_fingerprint").get<std::string>();
  e.key.decoding = decoding_from_json(j.at("decoding"));
  e.key.backend = j.at("backend").get<std::string>();
  e.answers = j.at("answers").get<std::vector<std::string>>();
  e.timestamp = j.value("timestamp", "");
  return e;
}

SampleCache::SampleCache(std::filesystem::path path) : path_(std::move(path)) {
  std::ifstream in(path_);
  if (!in) return;  // absent file is an empty cache
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      SampleCacheEntry e = SampleCacheEntry::from_json(json::parse(line));
      index_.try_emplace(e.key.canonical(), entries_.size());
      entries_.push_back(std::move(e));
    } catch (const std::exception& ex) {
      issues_.push_back({line_no, ex.what()});
    }
  }
}

std::optional<AnswerSet> SampleCache::lookup(const CacheKey& key) const {
  std::lock_guard lock(mu_);
  auto it = index_.find(key.canonical());
  if (it == index_.end()) return std::nullopt;
  const SampleCacheEntry& e = entries_[it->second];
  AnswerSet set;
  set.condition = e.key.condition;
  set.answers = e.answers;
  set.decoding = e.key.decoding;
  set.prompt_fingerprint = e.key.prompt_fingerprint;
  return set;
}

void SampleCache::append(const SampleCacheEntry& entry) {
  const std::string line = entry.to_json().dump() + "\n";
  std::lock_guard lock(mu_);
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
  const int fd = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd < 0) {
    throw Error(ErrorCode::kFileUnreadable, "cannot open cache " + path_.string() + ": " +
                                                std::strerror(errno));
  }
  ::flock(fd, LOCK_EX);
  std::size_t written = 0;
  bool ok = true;
  while (written < line.size()) {
    const ssize_t n = ::write(fd, line.data() + written, line.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      ok = false;
      break;
    }
    written += static_cast<std::size_t>(n);
  }
  if (ok) ok = ::fdatasync(fd) == 0;
  ::flock(fd, LOCK_UN);
  ::close(fd);
  if (!ok) throw Error(ErrorCode::kFileUnreadable, "failed writing cache " + path_.string());
  index_.try_emplace(entry.key.canonical(), entries_.size());
  entries_.push_back(entry);
}

std::size_t SampleCache::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace crux
