#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace crux {

// Lowercase, trim, collapse internal whitespace runs, and drop trailing
// sentence punctuation (. ! ?).
std::string normalize_answer(std::string_view raw);

std::string trim(std::string_view s);

std::vector<std::string> split_whitespace(std::string_view s);

std::size_t word_count(std::string_view s);

// 64-bit FNV-1a rendered as 16 lowercase hex digits.
std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string fingerprint(std::string_view data);

// Shortest decimal form that round-trips a double; locale independent.
std::string format_double(double v);

}  // namespace crux
