#include "crux/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "crux/error.hpp"
#include "crux/text.hpp"

namespace crux {

void CruxConfig::validate() const {
  if (n < 2) throw Error(ErrorCode::kConfigInvalid, "n must be >= 2");
  if (!(entail_threshold > 0.0 && entail_threshold <= 1.0)) {
    throw Error(ErrorCode::kConfigInvalid, "entail_threshold must lie in (0,1]");
  }
  if (max_inflight < 1) throw Error(ErrorCode::kConfigInvalid, "max_inflight must be >= 1");
  decoding.validate();
}

namespace {

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '\n') {
      out += "\\n";
    } else if (c == '\t') {
      out += "\\t";
    } else if (c == '\\') {
      out += "\\\\";
    } else {
      out.push_back(c);
    }
  }
  return out;
}

std::string unescape(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\' && i + 1 < s.size()) {
      const char next = s[++i];
      if (next == 'n') {
        out.push_back('\n');
      } else if (next == 't') {
        out.push_back('\t');
      } else {
        out.push_back(next);
      }
    } else {
      out.push_back(s[i]);
    }
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw Error(ErrorCode::kConfigInvalid, key + ": expected a boolean, got '" + v + "'");
}

template <typename T>
T parse_number(const std::string& key, const std::string& v) {
  T out{};
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    throw Error(ErrorCode::kConfigInvalid, key + ": expected a number, got '" + v + "'");
  }
  return out;
}

void apply(CruxConfig& c, const std::string& key, const std::string& v) {
  if (key == "n") {
    c.n = parse_number<int>(key, v);
  } else if (key == "entail_threshold") {
    c.entail_threshold = parse_number<double>(key, v);
  } else if (key == "use_clustering") {
    c.use_clustering = parse_bool(key, v);
  } else if (key == "use_gc") {
    c.use_gc = parse_bool(key, v);
  } else if (key == "gc_variant") {
    c.gc_variant = gc_variant_from_string(v);
  } else if (key == "temperature") {
    c.decoding.temperature = parse_number<double>(key, v);
  } else if (key == "max_tokens") {
    c.decoding.max_tokens = parse_number<int>(key, v);
  } else if (key == "decoding_seed") {
    if (v.empty() || v == "none") {
      c.decoding.seed.reset();
    } else {
      c.decoding.seed = parse_number<std::int64_t>(key, v);
    }
  } else if (key == "template_with_context") {
    c.templates.with_context = unescape(v);
  } else if (key == "template_context_free") {
    c.templates.context_free = unescape(v);
  } else if (key == "baseline_graph") {
    if (v == "with_context") {
      c.baseline_graph = BaselineGraph::kWithContext;
    } else if (v == "pooled") {
      c.baseline_graph = BaselineGraph::kPooled;
    } else {
      throw Error(ErrorCode::kConfigInvalid, "baseline_graph must be with_context or pooled");
    }
  } else if (key == "max_inflight") {
    c.max_inflight = parse_number<int>(key, v);
  } else if (key == "model") {
    c.model = v;
  } else if (key == "train_hidden") {
    c.train.hidden = parse_number<std::size_t>(key, v);
  } else if (key == "train_lr") {
    c.train.lr = parse_number<double>(key, v);
  } else if (key == "train_epochs") {
    c.train.epochs = parse_number<int>(key, v);
  } else if (key == "train_batch") {
    c.train.batch = parse_number<std::size_t>(key, v);
  } else if (key == "train_seed") {
    c.train.seed = parse_number<std::uint64_t>(key, v);
  } else {
    throw Error(ErrorCode::kConfigInvalid, "unknown config key '" + key + "'");
  }
}

}  // namespace

std::map<std::string, std::string> CruxConfig::to_map() const {
  return {
      {"n", std::to_string(n)},
      {"entail_threshold", format_double(entail_threshold)},
      {"use_clustering", use_clustering ? "true" : "false"},
      {"use_gc", use_gc ? "true" : "false"},
      {"gc_variant", std::string(to_string(gc_variant))},
      {"temperature", format_double(decoding.temperature)},
      {"max_tokens", std::to_string(decoding.max_tokens)},
      {"decoding_seed", decoding.seed ? std::to_string(*decoding.seed) : "none"},
      {"template_with_context", escape(templates.with_context)},
      {"template_context_free", escape(templates.context_free)},
      {"baseline_graph", baseline_graph == BaselineGraph::kPooled ? "pooled" : "with_context"},
      {"max_inflight", std::to_string(max_inflight)},
      {"model", model},
      {"train_hidden", std::to_string(train.hidden)},
      {"train_lr", format_double(train.lr)},
      {"train_epochs", std::to_string(train.epochs)},
      {"train_batch", std::to_string(train.batch)},
      {"train_seed", std::to_string(train.seed)},
  };
}

CruxConfig parse_config(std::string_view text, CruxConfig base) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped.front() == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kConfigInvalid, "line " + std::to_string(line_no) + ": expected key = value");
    }
    apply(base, trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
  }
  base.validate();
  return base;
}

CruxConfig load_config(const std::filesystem::path& path, CruxConfig base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kFileUnreadable, "cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

std::string render_config(const CruxConfig& cfg) {
  std::string out;
  for (const auto& [k, v] : cfg.to_map()) out += k + " = " + v + "\n";
  return out;
}

}  // namespace crux
