#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "crux/backends.hpp"
#include "crux/clustering.hpp"
#include "crux/text.hpp"

namespace testing_support {

// Small deterministic generator used by the property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  bool coin() { return integer(0, 1) == 1; }
  std::mt19937_64& engine() { return rng_; }

  // Random partition of 0..n-1 in generation order (every cluster lists its
  // members ascending, clusters ordered by first member).
  crux::Partition partition(std::size_t n) {
    std::vector<std::size_t> label(n);
    std::size_t next = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto pick = static_cast<std::size_t>(integer(0, static_cast<int>(next)));
      label[i] = pick;
      if (pick == next) ++next;
    }
    crux::Partition p;
    p.clusters.resize(next);
    for (std::size_t i = 0; i < n; ++i) p.clusters[label[i]].push_back(i);
    return p;
  }

  // Answers drawn from a small vocabulary with random surface noise so that
  // several raw strings share one normalized form.
  std::vector<std::string> answers(std::size_t n, int vocabulary) {
    static const char* kWords[] = {"paris", "london", "the pacific", "blue whale", "42",
                                   "mount everest", "x", "new york city"};
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) {
      std::string w = kWords[integer(0, std::min(vocabulary, 8) - 1)];
      switch (integer(0, 4)) {
        case 1: w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0]))); break;
        case 2: w += "."; break;
        case 3: w = "  " + w + " !"; break;
        case 4: {
          std::string up;
          for (char c : w) up += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
          w = up;
          break;
        }
        default: break;
      }
      out.push_back(w);
    }
    return out;
  }

  // Symmetric row-major matrix with unit diagonal and entries in [0,1].
  std::vector<double> similarity(std::size_t m) {
    std::vector<double> w(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      w[i * m + i] = 1.0;
      for (std::size_t j = i + 1; j < m; ++j) {
        const double v = real(0.0, 1.0);
        w[i * m + j] = v;
        w[j * m + i] = v;
      }
    }
    return w;
  }

 private:
  std::mt19937_64 rng_;
};

// Group-by-normalized-string in first-appearance order.
inline crux::Partition group_by_normalized(const std::vector<std::string>& answers) {
  std::map<std::string, std::size_t> slot;
  crux::Partition p;
  for (std::size_t i = 0; i < answers.size(); ++i) {
    const auto key = crux::normalize_answer(answers[i]);
    auto [it, fresh] = slot.emplace(key, p.clusters.size());
    if (fresh) p.clusters.emplace_back();
    p.clusters[it->second].push_back(i);
  }
  return p;
}

// -sum p ln p in long double.
inline double entropy_oracle(const std::vector<double>& p) {
  long double h = 0.0L;
  for (double x : p) {
    if (x > 0) h -= static_cast<long double>(x) * std::log(static_cast<long double>(x));
  }
  return static_cast<double>(h);
}

// Brute-force pair counting over every positive/negative pair.
inline double auroc_oracle(const std::vector<double>& s, const std::vector<int>& y) {
  double wins = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (y[i] != 1) continue;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[j] != 0) continue;
      pairs += 1.0;
      if (s[i] > s[j]) wins += 1.0;
      else if (s[i] == s[j]) wins += 0.5;
    }
  }
  return wins / pairs;
}

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("crux_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace testing_support
