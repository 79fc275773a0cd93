#include <gtest/gtest.h>

#include "crux/error.hpp"
#include "crux/prompt.hpp"
#include "crux/text.hpp"
#include "crux/types.hpp"

using namespace crux;

TEST(NormalizeAnswer, Examples) {
  EXPECT_EQ(normalize_answer("  The  Pacific. "), "the pacific");
  EXPECT_EQ(normalize_answer(""), "");
  EXPECT_EQ(normalize_answer("Horses!"), "horses");
  EXPECT_EQ(normalize_answer("What?!  "), "what");
  EXPECT_EQ(normalize_answer("a\t\nb"), "a b");
}

TEST(NormalizeAnswer, Idempotent) {
  for (const char* s : {"  The  Pacific. ", "Horses!", "x", "  A B  C ?", "..."}) {
    const auto once = normalize_answer(s);
    EXPECT_EQ(normalize_answer(once), once) << s;
  }
}

TEST(Text, WordsAndTrim) {
  EXPECT_EQ(trim("  a b \n"), "a b");
  EXPECT_EQ(split_whitespace(" one  two\tthree "), (std::vector<std::string>{"one", "two", "three"}));
  EXPECT_EQ(word_count(""), 0u);
  EXPECT_EQ(word_count("a b  c"), 3u);
}

TEST(Text, FingerprintIsFnv1a) {
  // Published FNV-1a 64 test vectors.
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ULL);
  EXPECT_EQ(fingerprint("a"), "af63dc4c8601ec8c");
  EXPECT_EQ(fingerprint("").size(), 16u);
}

TEST(Text, FormatDoubleRoundTrips) {
  EXPECT_EQ(format_double(0.0), "0");
  EXPECT_EQ(format_double(-0.0), "0");
  EXPECT_EQ(format_double(0.75), "0.75");
  EXPECT_EQ(format_double(1.0), "1");
  for (double v : {0.1, 1.0 / 3.0, -2.302585092994046, 1e-300, 123456789.0}) {
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
}

TEST(BuildPrompt, Examples) {
  EXPECT_EQ(build_prompt("Q?", std::string("CTX")), "Context: CTX\nQuestion: Q?\nAnswer concisely:");
  EXPECT_EQ(build_prompt("Q?", std::nullopt), "Question: Q?\nAnswer concisely:");
}

TEST(BuildPrompt, MissingPlaceholder) {
  PromptTemplate t;
  t.context_free = "Answer:";
  try {
    build_prompt("Q?", std::nullopt, t);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTemplateMissingPlaceholder);
  }
  PromptTemplate u;
  u.with_context = "Question: {query}";
  try {
    build_prompt("Q?", std::string("C"), u);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTemplateMissingPlaceholder);
  }
}

TEST(BuildPrompt, SubstitutionIsSinglePass) {
  // A query containing a placeholder is not expanded again.
  EXPECT_EQ(build_prompt("{context}", std::string("C")), "Context: C\nQuestion: {context}\nAnswer concisely:");
}

TEST(Types, ConditionNames) {
  EXPECT_EQ(to_string(Condition::kWithContext), "with_context");
  EXPECT_EQ(to_string(Condition::kContextFree), "context_free");
  EXPECT_EQ(condition_from_string("context_free"), Condition::kContextFree);
  EXPECT_THROW(condition_from_string("both"), Error);
}

TEST(Types, DecodingValidation) {
  DecodingParams p;
  EXPECT_NO_THROW(p.validate());
  p.temperature = -0.1;
  EXPECT_THROW(p.validate(), Error);
  p.temperature = 0.7;
  p.max_tokens = 0;
  EXPECT_THROW(p.validate(), Error);
}
