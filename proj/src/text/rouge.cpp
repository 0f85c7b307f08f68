#include <algorithm>

#include "la3/textmetrics.hpp"
#include "ngram.hpp"

namespace la3::text {
namespace {

RougeScore from_counts(std::size_t overlap, std::size_t cand_total, std::size_t ref_total) {
  RougeScore s;
  s.precision = cand_total == 0 ? 0.0 : static_cast<double>(overlap) / static_cast<double>(cand_total);
  s.recall = ref_total == 0 ? 0.0 : static_cast<double>(overlap) / static_cast<double>(ref_total);
  s.f1 = s.precision + s.recall == 0.0 ? 0.0 : 2.0 * s.precision * s.recall / (s.precision + s.recall);
  return s;
}

}  // namespace

RougeScore rouge(const TokenSeq& candidate, const TokenSeq& reference, RougeVariant variant) {
  if (candidate.mode != reference.mode) throw MetricError(MetricError::Kind::ModeMismatch, "ROUGE token modes differ");
  if (reference.empty()) throw MetricError(MetricError::Kind::EmptySequence, "ROUGE reference is empty");
  if (candidate.empty()) return RougeScore{0.0, 0.0, 0.0, 0};

  if (variant == RougeVariant::L) {
    const auto lcs = lcs_length(candidate.tokens, reference.tokens);
    return from_counts(lcs, candidate.size(), reference.size());
  }
  const std::size_t n = variant == RougeVariant::One ? 1 : 2;
  const auto cand = detail::count_ngrams(candidate.tokens, n);
  const auto ref = detail::count_ngrams(reference.tokens, n);
  std::size_t overlap = 0;
  for (const auto& [gram, count] : cand) {
    const auto it = ref.find(gram);
    if (it != ref.end()) overlap += std::min(count, it->second);
  }
  const auto grams = [n](std::size_t len) { return len >= n ? len - n + 1 : 0; };
  return from_counts(overlap, grams(candidate.size()), grams(reference.size()));
}

}  // namespace la3::text
