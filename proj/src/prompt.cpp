#include "crux/prompt.hpp"

#include <cmath>

#include "crux/error.hpp"
#include "crux/types.hpp"

namespace crux {

std::string_view to_string(SourceDataset d) {
  switch (d) {
    case SourceDataset::kSquad: return "squad";
    case SourceDataset::kCoqa: return "coqa";
    case SourceDataset::kGeneric: return "generic";
  }
  return "generic";
}

std::string_view to_string(Condition c) {
  return c == Condition::kWithContext ? "with_context" : "context_free";
}

Condition condition_from_string(std::string_view s) {
  if (s == "with_context") return Condition::kWithContext;
  if (s == "context_free") return Condition::kContextFree;
  throw Error(ErrorCode::kSchemaMismatch, "unknown condition '" + std::string(s) + "'");
}

void DecodingParams::validate() const {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw Error(ErrorCode::kConfigInvalid, "temperature must be > 0");
  }
  if (max_tokens <= 0) throw Error(ErrorCode::kConfigInvalid, "max_tokens must be positive");
}

namespace {

// Single left-to-right pass so that substituted text is never rescanned.
std::string substitute(std::string_view tmpl, std::string_view query,
                       std::string_view context) {
  constexpr std::string_view kQuery = "{query}";
  constexpr std::string_view kContext = "{context}";
  std::string out;
  out.reserve(tmpl.size() + query.size() + context.size());
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl.compare(i, kQuery.size(), kQuery) == 0) {
      out.append(query);
      i += kQuery.size();
    } else if (tmpl.compare(i, kContext.size(), kContext) == 0) {
      out.append(context);
      i += kContext.size();
    } else {
      out.push_back(tmpl[i++]);
    }
  }
  return out;
}

bool contains(std::string_view s, std::string_view needle) {
  return s.find(needle) != std::string_view::npos;
}

}  // namespace

std::string build_prompt(std::string_view query, const std::optional<std::string>& context,
                         const PromptTemplate& tmpl) {
  if (query.empty()) throw Error(ErrorCode::kConfigInvalid, "query must be non-empty");
  if (context) {
    if (!contains(tmpl.with_context, "{query}") || !contains(tmpl.with_context, "{context}")) {
      throw Error(ErrorCode::kTemplateMissingPlaceholder,
                  "with-context template needs {context} and {query}");
    }
    return substitute(tmpl.with_context, query, *context);
  }
  if (!contains(tmpl.context_free, "{query}")) {
    throw Error(ErrorCode::kTemplateMissingPlaceholder, "context-free template needs {query}");
  }
  return substitute(tmpl.context_free, query, "");
}

}  // namespace crux
