#pragma once

// Slow, direct implementations used to check the library's metrics.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace la3::oracle {

/// Plain recursive edit distance, exponential time.
inline std::size_t levenshtein_recursive(const std::string& a, const std::string& b) {
  if (a.empty()) return b.size();
  if (b.empty()) return a.size();
  const std::string a1 = a.substr(0, a.size() - 1);
  const std::string b1 = b.substr(0, b.size() - 1);
  const std::size_t sub = levenshtein_recursive(a1, b1) + (a.back() == b.back() ? 0 : 1);
  return std::min({levenshtein_recursive(a1, b) + 1, levenshtein_recursive(a, b1) + 1, sub});
}

/// Every string of length 0..max_len over `alphabet` in shortlex order, with
/// the index of each string's one-shorter prefix.
struct StringUniverse {
  std::vector<std::string> strings;
  std::vector<std::int32_t> parent;  // -1 for the empty string

  StringUniverse(const std::string& alphabet, std::size_t max_len) {
    strings.emplace_back();
    parent.push_back(-1);
    std::size_t level_begin = 0;
    for (std::size_t len = 1; len <= max_len; ++len) {
      const std::size_t level_end = strings.size();
      for (std::size_t p = level_begin; p < level_end; ++p) {
        for (char c : alphabet) {
          strings.push_back(strings[p] + c);
          parent.push_back(static_cast<std::int32_t>(p));
        }
      }
      level_begin = level_end;
    }
  }
};

/// The same recurrence as levenshtein_recursive, memoized over every pair of
/// strings in the universe. Parents precede children, so a row-major sweep
/// only ever reads finished entries. Entry (i, j) is at i * n + j.
inline std::vector<std::uint8_t> levenshtein_all_pairs(const StringUniverse& u) {
  const std::size_t n = u.strings.size();
  std::vector<std::uint8_t> d(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = u.strings[i];
    for (std::size_t j = 0; j < n; ++j) {
      const auto& b = u.strings[j];
      std::uint8_t v;
      if (a.empty()) {
        v = static_cast<std::uint8_t>(b.size());
      } else if (b.empty()) {
        v = static_cast<std::uint8_t>(a.size());
      } else {
        const auto pi = static_cast<std::size_t>(u.parent[i]);
        const auto pj = static_cast<std::size_t>(u.parent[j]);
        const int del = d[pi * n + j] + 1;
        const int ins = d[i * n + pj] + 1;
        const int sub = d[pi * n + pj] + (a.back() == b.back() ? 0 : 1);
        v = static_cast<std::uint8_t>(std::min({del, ins, sub}));
      }
      d[i * n + j] = v;
    }
  }
  return d;
}

/// Longest common subsequence by trying every subsequence of `a`.
inline std::size_t lcs_brute_force(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::size_t best = 0;
  const std::size_t subsets = std::size_t{1} << a.size();
  for (std::size_t mask = 0; mask < subsets; ++mask) {
    const auto len = static_cast<std::size_t>(__builtin_popcountll(mask));
    if (len <= best) continue;
    std::size_t j = 0;
    bool ok = true;
    for (std::size_t i = 0; i < a.size() && ok; ++i) {
      if (!(mask >> i & 1U)) continue;
      while (j < b.size() && b[j] != a[i]) ++j;
      if (j == b.size()) ok = false;
      else ++j;
    }
    if (ok) best = len;
  }
  return best;
}

inline std::map<std::vector<std::string>, std::size_t> ngrams(const std::vector<std::string>& t, std::size_t n) {
  std::map<std::vector<std::string>, std::size_t> out;
  for (std::size_t i = 0; i + n <= t.size(); ++i) ++out[std::vector<std::string>(t.begin() + i, t.begin() + i + n)];
  return out;
}

struct BleuCase {
  std::vector<std::string> candidate;
  std::vector<std::vector<std::string>> references;
};

/// Corpus BLEU straight from its definition, no smoothing.
inline double corpus_bleu(const std::vector<BleuCase>& cases, int max_n) {
  double log_sum = 0.0;
  for (int n = 1; n <= max_n; ++n) {
    double clipped = 0.0;
    double total = 0.0;
    for (const auto& c : cases) {
      const auto cand = ngrams(c.candidate, n);
      std::map<std::vector<std::string>, std::size_t> max_ref;
      for (const auto& r : c.references) {
        for (const auto& [g, k] : ngrams(r, n)) max_ref[g] = std::max(max_ref[g], k);
      }
      for (const auto& [g, k] : cand) {
        clipped += static_cast<double>(std::min(k, max_ref[g]));
        total += static_cast<double>(k);
      }
    }
    if (clipped == 0.0 || total == 0.0) return 0.0;
    log_sum += std::log(clipped / total) / max_n;
  }
  double c_len = 0.0;
  double r_len = 0.0;
  for (const auto& cs : cases) {
    c_len += static_cast<double>(cs.candidate.size());
    std::size_t best = cs.references.front().size();
    for (const auto& r : cs.references) {
      const auto diff = [&](std::size_t len) {
        return len > cs.candidate.size() ? len - cs.candidate.size() : cs.candidate.size() - len;
      };
      if (diff(r.size()) < diff(best) || (diff(r.size()) == diff(best) && r.size() < best)) best = r.size();
    }
    r_len += static_cast<double>(best);
  }
  const double bp = c_len > r_len ? 1.0 : std::exp(1.0 - r_len / c_len);
  return bp * std::exp(log_sum);
}

/// METEOR by enumerating every alignment of exact matches: the maximum
/// number of matches first, then the fewest chunks.
inline double meteor_exhaustive(const std::vector<std::string>& cand, const std::vector<std::string>& ref,
                                double alpha = 0.9, double beta = 3.0, double gamma = 0.5) {
  std::size_t best_matches = 0;
  std::size_t best_chunks = 0;
  std::vector<int> align(cand.size(), -1);
  std::vector<bool> used(ref.size(), false);
  auto score_alignment = [&] {
    std::size_t m = 0;
    std::size_t chunks = 0;
    int prev_c = -2;
    int prev_r = -2;
    for (std::size_t i = 0; i < cand.size(); ++i) {
      if (align[i] < 0) continue;
      ++m;
      if (!(static_cast<int>(i) == prev_c + 1 && align[i] == prev_r + 1)) ++chunks;
      prev_c = static_cast<int>(i);
      prev_r = align[i];
    }
    if (m > best_matches || (m == best_matches && m > 0 && chunks < best_chunks)) {
      best_matches = m;
      best_chunks = chunks;
    }
  };
  auto rec = [&](auto&& self, std::size_t i) -> void {
    if (i == cand.size()) {
      score_alignment();
      return;
    }
    self(self, i + 1);
    for (std::size_t j = 0; j < ref.size(); ++j) {
      if (used[j] || ref[j] != cand[i]) continue;
      used[j] = true;
      align[i] = static_cast<int>(j);
      self(self, i + 1);
      align[i] = -1;
      used[j] = false;
    }
  };
  rec(rec, 0);
  if (best_matches == 0) return 0.0;
  const double m = static_cast<double>(best_matches);
  const double p = m / static_cast<double>(cand.size());
  const double r = m / static_cast<double>(ref.size());
  const double f = p * r / (alpha * p + (1.0 - alpha) * r);
  const double penalty = gamma * std::pow(static_cast<double>(best_chunks) / m, beta);
  return f * (1.0 - penalty);
}

inline double tanimoto_sets(const std::set<std::size_t>& a, const std::set<std::size_t>& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t both = 0;
  for (auto x : a) both += b.count(x);
  return static_cast<double>(both) / static_cast<double>(a.size() + b.size() - both);
}

}  // namespace la3::oracle
