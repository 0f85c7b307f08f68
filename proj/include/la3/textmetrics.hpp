#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "la3/error.hpp"

namespace la3::text {

inline constexpr std::string_view kTokenizerVersion = "tokenizer=v1";

enum class TokenMode : std::uint8_t { Char, Word };

std::string_view to_string(TokenMode m) noexcept;

struct TokenSeq {
  std::vector<std::string> tokens;
  TokenMode mode = TokenMode::Word;

  [[nodiscard]] std::size_t size() const noexcept { return tokens.size(); }
  [[nodiscard]] bool empty() const noexcept { return tokens.empty(); }
  friend bool operator==(const TokenSeq&, const TokenSeq&) = default;
};

class MetricError : public DataError {
 public:
  enum class Kind { EmptyCorpus, ModeMismatch, EmptySequence, BadArgument };
  MetricError(Kind kind, const std::string& what) : DataError(what), kind_(kind) {}
  [[nodiscard]] Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// One token per Unicode scalar value. Malformed UTF-8 bytes become one
/// token each.
TokenSeq tokenize_chars(std::string_view text);

/// ASCII-lowercased; split on whitespace (ASCII and common Unicode spaces);
/// every ASCII punctuation character becomes its own token.
TokenSeq tokenize_words(std::string_view text);

TokenSeq tokenize(std::string_view text, TokenMode mode);

/// Decodes UTF-8 to code points, replacing malformed bytes with U+FFFD.
std::u32string decode_utf8(std::string_view text);

/// Edit distance in Unicode scalars, O(min(|a|, |b|)) memory.
std::size_t levenshtein(std::string_view a, std::string_view b);
std::size_t levenshtein(std::u32string_view a, std::u32string_view b);

struct BleuPair {
  TokenSeq candidate;
  std::vector<TokenSeq> references;
};

struct BleuOptions {
  int max_n = 4;
  /// Added to every clipped n-gram count; 0 disables smoothing.
  double epsilon = 0.0;
};

/// Corpus BLEU with clipped counts, uniform weights, and the brevity penalty
/// computed against the closest reference length (shorter on ties).
double corpus_bleu(std::span<const BleuPair> pairs, const BleuOptions& options = {});

enum class RougeVariant : std::uint8_t { One, Two, L };

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  /// 0 when the candidate was empty (scored as zero), 1 otherwise.
  std::size_t support = 1;
};

RougeScore rouge(const TokenSeq& candidate, const TokenSeq& reference, RougeVariant variant);

/// Longest common subsequence length, O(min) memory.
std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b);

struct MeteorParams {
  double alpha = 0.9;
  double beta = 3.0;
  double gamma = 0.5;
  std::size_t beam_width = 256;
};

struct MeteorDetail {
  double score = 0.0;
  std::size_t matches = 0;
  std::size_t chunks = 0;
};

/// Exact-match METEOR. The alignment has the maximum number of unigram
/// matches; among those, a beam search looks for the fewest chunks.
MeteorDetail meteor_detail(const TokenSeq& candidate, const TokenSeq& reference, const MeteorParams& params = {});
double meteor(const TokenSeq& candidate, const TokenSeq& reference, const MeteorParams& params = {});

}  // namespace la3::text
