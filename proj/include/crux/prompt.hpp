#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace crux {

// Placeholders: {context} and {query}. The context-free form needs only
// {query}.
struct PromptTemplate {
  std::string with_context = "Context: {context}\nQuestion: {query}\nAnswer concisely:";
  std::string context_free = "Question: {query}\nAnswer concisely:";
};

std::string build_prompt(std::string_view query, const std::optional<std::string>& context,
                         const PromptTemplate& tmpl = {});

}  // namespace crux
