#include "crux/text.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>

#include "crux/error.hpp"

namespace crux {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kBackendUnavailable: return "BackendUnavailable";
    case ErrorCode::kMalformedResponse: return "MalformedResponse";
    case ErrorCode::kEmptyAnswer: return "EmptyAnswer";
    case ErrorCode::kConfigInvalid: return "ConfigInvalid";
    case ErrorCode::kTemplateMissingPlaceholder: return "TemplateMissingPlaceholder";
    case ErrorCode::kZeroTotal: return "ZeroTotal";
    case ErrorCode::kInvalidDistribution: return "InvalidDistribution";
    case ErrorCode::kMatrixInvalid: return "MatrixInvalid";
    case ErrorCode::kOutOfRange: return "OutOfRange";
    case ErrorCode::kZeroDegreeRow: return "ZeroDegreeRow";
    case ErrorCode::kMissingInput: return "MissingInput";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kDegenerateLabels: return "DegenerateLabels";
    case ErrorCode::kEmptyData: return "EmptyData";
    case ErrorCode::kSingleClass: return "SingleClass";
    case ErrorCode::kFileUnreadable: return "FileUnreadable";
    case ErrorCode::kSchemaMismatch: return "SchemaMismatch";
    case ErrorCode::kCacheCorrupt: return "CacheCorrupt";
    case ErrorCode::kMissingFusionParams: return "MissingFusionParams";
  }
  return "Unknown";
}

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

}  // namespace

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

std::string normalize_answer(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (char c : raw) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  // "Paris ." should come out as "paris", so strip punctuation and any
  // whitespace it exposes until neither remains.
  while (!out.empty() && (out.back() == '.' || out.back() == '!' || out.back() == '?' ||
                          out.back() == ' ')) {
    out.pop_back();
  }
  return out;
}

std::vector<std::string> split_whitespace(std::string_view s) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    std::size_t j = i;
    while (j < s.size() && !is_space(s[j])) ++j;
    if (j > i) tokens.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return tokens;
}

std::size_t word_count(std::string_view s) {
  std::size_t count = 0;
  bool in_word = false;
  for (char c : s) {
    if (is_space(c)) {
      in_word = false;
    } else if (!in_word) {
      in_word = true;
      ++count;
    }
  }
  return count;
}

std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string fingerprint(std::string_view data) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a64(data)));
  return std::string(buf, 16);
}

std::string format_double(double v) {
  if (v == 0.0) return "0";  // folds -0
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) return "nan";
  return std::string(buf.data(), ptr);
}

}  // namespace crux
