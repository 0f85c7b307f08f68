#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>
#include <vector>

#include "la3/textmetrics.hpp"

namespace la3::text {
namespace {

struct AlignState {
  std::vector<bool> ref_used;
  std::vector<std::size_t> matched_per_word;
  int last_ref = -1;  // reference index of the previous candidate token, -1 if unmatched
  std::size_t chunks = 0;
};

bool better(const AlignState& a, const AlignState& b) {
  if (a.chunks != b.chunks) return a.chunks < b.chunks;
  if (a.last_ref != b.last_ref) return a.last_ref < b.last_ref;
  return a.ref_used < b.ref_used;
}

}  // namespace

MeteorDetail meteor_detail(const TokenSeq& candidate, const TokenSeq& reference, const MeteorParams& params) {
  if (candidate.mode != reference.mode) throw MetricError(MetricError::Kind::ModeMismatch, "METEOR token modes differ");
  if (reference.empty()) throw MetricError(MetricError::Kind::EmptySequence, "METEOR reference is empty");
  if (candidate.empty()) return {};

  std::unordered_map<std::string, std::size_t> word_ids;
  auto id_of = [&](const std::string& w) { return word_ids.emplace(w, word_ids.size()).first->second; };
  std::vector<std::size_t> cand_ids;
  cand_ids.reserve(candidate.size());
  for (const auto& t : candidate.tokens) cand_ids.push_back(id_of(t));
  std::vector<std::vector<int>> ref_positions(word_ids.size());
  for (std::size_t j = 0; j < reference.size(); ++j) {
    const auto it = word_ids.find(reference.tokens[j]);
    if (it != word_ids.end()) ref_positions[it->second].push_back(static_cast<int>(j));
  }

  // The maximum match count per word type is fixed; only its arrangement is
  // searched.
  std::vector<std::size_t> need(word_ids.size(), 0);
  std::vector<std::size_t> cand_count(word_ids.size(), 0);
  for (auto w : cand_ids) ++cand_count[w];
  std::size_t matches = 0;
  for (std::size_t w = 0; w < need.size(); ++w) {
    need[w] = std::min(cand_count[w], ref_positions[w].size());
    matches += need[w];
  }
  if (matches == 0) return {};

  std::vector<std::size_t> remaining_after(candidate.size());
  {
    std::vector<std::size_t> seen(word_ids.size(), 0);
    for (std::size_t i = candidate.size(); i-- > 0;) {
      remaining_after[i] = seen[cand_ids[i]];
      ++seen[cand_ids[i]];
    }
  }

  std::vector<AlignState> beam;
  beam.push_back({std::vector<bool>(reference.size(), false), std::vector<std::size_t>(word_ids.size(), 0), -1, 0});
  for (std::size_t i = 0; i < candidate.size(); ++i) {
    const auto w = cand_ids[i];
    std::vector<AlignState> next;
    for (const auto& st : beam) {
      const std::size_t still_needed = need[w] - st.matched_per_word[w];
      if (still_needed <= remaining_after[i]) {
        AlignState skip = st;
        skip.last_ref = -1;
        next.push_back(std::move(skip));
      }
      if (still_needed == 0) continue;
      for (int j : ref_positions[w]) {
        if (st.ref_used[static_cast<std::size_t>(j)]) continue;
        AlignState take = st;
        take.ref_used[static_cast<std::size_t>(j)] = true;
        ++take.matched_per_word[w];
        if (!(st.last_ref >= 0 && j == st.last_ref + 1)) ++take.chunks;
        take.last_ref = j;
        next.push_back(std::move(take));
      }
    }
    std::sort(next.begin(), next.end(), better);
    // Same (used set, last_ref) means identical futures; keep the cheapest.
    std::vector<AlignState> pruned;
    std::map<std::pair<int, std::vector<bool>>, bool> seen;
    for (auto& st : next) {
      if (!seen.emplace(std::make_pair(st.last_ref, st.ref_used), true).second) continue;
      pruned.push_back(std::move(st));
      if (pruned.size() >= params.beam_width) break;
    }
    beam = std::move(pruned);
  }

  const std::size_t chunks = beam.front().chunks;
  const double m = static_cast<double>(matches);
  const double precision = m / static_cast<double>(candidate.size());
  const double recall = m / static_cast<double>(reference.size());
  const double fmean = precision * recall / (params.alpha * precision + (1.0 - params.alpha) * recall);
  const double penalty = params.gamma * std::pow(static_cast<double>(chunks) / m, params.beta);
  return {fmean * (1.0 - penalty), matches, chunks};
}

double meteor(const TokenSeq& candidate, const TokenSeq& reference, const MeteorParams& params) {
  return meteor_detail(candidate, reference, params).score;
}

}  // namespace la3::text
