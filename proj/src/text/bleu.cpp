#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "la3/textmetrics.hpp"
#include "ngram.hpp"

namespace la3::text {

double corpus_bleu(std::span<const BleuPair> pairs, const BleuOptions& options) {
  if (options.max_n != 2 && options.max_n != 4) {
    throw MetricError(MetricError::Kind::BadArgument, "BLEU max_n must be 2 or 4");
  }
  if (pairs.empty()) throw MetricError(MetricError::Kind::EmptyCorpus, "BLEU over an empty corpus");
  const TokenMode mode = pairs.front().candidate.mode;
  const auto max_n = static_cast<std::size_t>(options.max_n);

  std::vector<double> matched(max_n, 0.0);
  std::vector<double> total(max_n, 0.0);
  std::size_t cand_len = 0;
  std::size_t ref_len = 0;

  for (const auto& pair : pairs) {
    if (pair.candidate.mode != mode) throw MetricError(MetricError::Kind::ModeMismatch, "BLEU token modes differ");
    if (pair.references.empty()) {
      throw MetricError(MetricError::Kind::EmptyCorpus, "BLEU pair without references");
    }
    const std::size_t c = pair.candidate.size();
    cand_len += c;
    std::size_t best = pair.references.front().size();
    for (const auto& ref : pair.references) {
      if (ref.mode != mode) throw MetricError(MetricError::Kind::ModeMismatch, "BLEU token modes differ");
      const auto diff = [&](std::size_t r) { return r > c ? r - c : c - r; };
      if (diff(ref.size()) < diff(best) || (diff(ref.size()) == diff(best) && ref.size() < best)) best = ref.size();
    }
    ref_len += best;

    for (std::size_t n = 1; n <= max_n; ++n) {
      const auto cand = detail::count_ngrams(pair.candidate.tokens, n);
      detail::NgramCounts max_ref;
      for (const auto& ref : pair.references) {
        for (const auto& [gram, count] : detail::count_ngrams(ref.tokens, n)) {
          auto& slot = max_ref[gram];
          slot = std::max(slot, count);
        }
      }
      std::size_t clipped = 0;
      for (const auto& [gram, count] : cand) {
        const auto it = max_ref.find(gram);
        if (it != max_ref.end()) clipped += std::min(count, it->second);
      }
      matched[n - 1] += static_cast<double>(clipped);
      total[n - 1] += static_cast<double>(c >= n ? c - n + 1 : 0);
    }
  }

  if (cand_len == 0) return 0.0;
  double log_sum = 0.0;
  for (std::size_t n = 0; n < max_n; ++n) {
    const double num = matched[n] + options.epsilon;
    const double den = total[n] + options.epsilon;
    if (num <= 0.0 || den <= 0.0) return 0.0;
    log_sum += std::log(num / den) / static_cast<double>(max_n);
  }
  const double bp = cand_len > ref_len
                        ? 1.0
                        : std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(cand_len));
  return std::clamp(bp * std::exp(log_sum), 0.0, 1.0);
}

}  // namespace la3::text
