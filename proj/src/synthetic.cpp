#include "crux/synthetic.hpp"

#include <cctype>
#include <random>

#include "crux/error.hpp"
#include "crux/text.hpp"

namespace crux {

std::string_view to_string(SyntheticRegime r) {
  switch (r) {
    case SyntheticRegime::kContextInformative: return "context_informative";
    case SyntheticRegime::kKnowledgeSufficient: return "knowledge_sufficient";
    case SyntheticRegime::kModelUncertain: return "model_uncertain";
  }
  return "unknown";
}

namespace {

class Draw {
 public:
  explicit Draw(std::uint64_t seed) : rng_(seed) {}

  // Uniform integer in [lo, hi].
  int between(int lo, int hi) {
    return lo + static_cast<int>(rng_() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[rng_() % i]);
    }
  }

 private:
  std::mt19937_64 rng_;
};

// Surface variants that normalize to the same text.
std::string reference_variant(const std::string& ref, int which) {
  switch (which % 4) {
    case 0: return ref;
    case 1: {
      std::string s = ref;
      s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
      return s;
    }
    case 2: return ref + ".";
    default: return "  " + ref + "!";
  }
}

// `count` answers covering `values` with every value used at least once.
std::vector<std::string> spread(const std::vector<std::string>& values, int count, Draw& draw) {
  std::vector<std::string> out(values.begin(), values.end());
  while (static_cast<int>(out.size()) < count) {
    out.push_back(values[static_cast<std::size_t>(draw.between(0, static_cast<int>(values.size()) - 1))]);
  }
  out.resize(static_cast<std::size_t>(count));
  draw.shuffle(out);
  return out;
}

std::vector<std::string> mostly_reference(const std::string& ref, int n, int wrong,
                                          const std::string& wrong_prefix, Draw& draw) {
  std::vector<std::string> out;
  for (int i = 0; i < n - wrong; ++i) out.push_back(reference_variant(ref, draw.between(0, 3)));
  for (int i = 0; i < wrong; ++i) out.push_back(wrong_prefix + " " + std::to_string(i));
  draw.shuffle(out);
  return out;
}

std::vector<std::string> distinct_values(const std::string& prefix, int k) {
  std::vector<std::string> v;
  for (int i = 0; i < k; ++i) v.push_back(prefix + " " + std::to_string(i));
  return v;
}

int ceil_frac(int n, int num, int den) { return (n * num + den - 1) / den; }

}  // namespace

SyntheticSuite make_synthetic_suite(std::size_t records, int n, std::uint64_t seed,
                                    const PromptTemplate& templates) {
  if (n < 2) throw Error(ErrorCode::kConfigInvalid, "synthetic suite needs n >= 2");
  Draw draw(seed);
  SyntheticSuite suite;
  for (std::size_t i = 0; i < records; ++i) {
    const auto regime = static_cast<SyntheticRegime>(i % 3);
    const std::string tag = std::to_string(i);
    QuestionRecord r;
    r.id = "syn-" + std::string(3 - std::min<std::size_t>(3, tag.size()), '0') + tag;
    r.query = "Which harbor is described in passage " + tag + "?";
    r.reference_answer = "harbor " + tag;
    r.context = "Passage " + tag + ". The ships of the story dock at " + r.reference_answer +
                ", which the passage describes at length.";
    r.source_dataset = SourceDataset::kGeneric;
    r.tags = {"synthetic", std::string(to_string(regime))};
    r.answerable = true;

    std::vector<std::string> with_context;
    std::vector<std::string> context_free;
    switch (regime) {
      case SyntheticRegime::kContextInformative:
        with_context = mostly_reference(r.reference_answer, n, draw.between(0, 1), "dock " + tag, draw);
        context_free = spread(distinct_values("guess " + tag, draw.between(ceil_frac(n, 3, 5), n)), n, draw);
        break;
      case SyntheticRegime::kKnowledgeSufficient:
        with_context = mostly_reference(r.reference_answer, n, draw.between(0, 1), "slip " + tag, draw);
        context_free = mostly_reference(r.reference_answer, n, draw.between(0, 1), "slip " + tag, draw);
        break;
      case SyntheticRegime::kModelUncertain: {
        const int lo = ceil_frac(n, 1, 2);
        const int hi = ceil_frac(n, 4, 5);
        with_context = spread(distinct_values("misread " + tag, draw.between(lo, hi)), n, draw);
        context_free = spread(distinct_values("unsure " + tag, draw.between(lo, hi)), n, draw);
        break;
      }
    }
    suite.script[fingerprint(build_prompt(r.query, r.context, templates))] = std::move(with_context);
    suite.script[fingerprint(build_prompt(r.query, std::nullopt, templates))] = std::move(context_free);
    suite.records.push_back(std::move(r));
    suite.regimes.push_back(regime);
  }
  return suite;
}

}  // namespace crux
