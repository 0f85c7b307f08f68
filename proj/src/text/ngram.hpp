#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <unordered_map>

namespace la3::text::detail {

using NgramCounts = std::unordered_map<std::string, std::size_t>;

/// n-gram multiset; tokens are joined with U+001F, which the tokenizers never
/// emit inside a token.
inline NgramCounts count_ngrams(std::span<const std::string> tokens, std::size_t n) {
  NgramCounts counts;
  if (n == 0 || tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key = tokens[i];
    for (std::size_t k = 1; k < n; ++k) {
      key += '\x1f';
      key += tokens[i + k];
    }
    ++counts[key];
  }
  return counts;
}

}  // namespace la3::text::detail
