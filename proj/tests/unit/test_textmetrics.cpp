#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "la3/textmetrics.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace la3;
using namespace la3::text;

namespace {

TokenSeq words(std::vector<std::string> t) { return {std::move(t), TokenMode::Word}; }

std::vector<std::string> random_tokens(std::mt19937_64& rng, std::size_t max_len, std::size_t vocab) {
  std::vector<std::string> t(rng() % (max_len + 1));
  for (auto& s : t) s = std::string(1, static_cast<char>('a' + rng() % vocab));
  return t;
}

std::string random_string(std::mt19937_64& rng, std::size_t max_len) {
  std::string s;
  for (auto n = rng() % (max_len + 1); n > 0; --n) s += static_cast<char>('a' + rng() % 4);
  return s;
}

}  // namespace

TEST_CASE("tokenizers") {
  CHECK(tokenize_chars("CCO").tokens == std::vector<std::string>{"C", "C", "O"});
  CHECK(tokenize_chars("aβc").tokens == std::vector<std::string>{"a", "β", "c"});
  CHECK(tokenize_chars("a\xff").size() == 2);
  CHECK(tokenize_chars("").empty());
  CHECK(tokenize_words("The molecule, (R)-Alanine.").tokens ==
        std::vector<std::string>{"the", "molecule", ",", "(", "r", ")", "-", "alanine", "."});
  CHECK(tokenize_words("  a\tb c\n").tokens == std::vector<std::string>{"a", "b", "c"});
  CHECK(tokenize_words("   ").empty());
  CHECK(tokenize("ab", TokenMode::Char).mode == TokenMode::Char);
  CHECK(decode_utf8("é") == U"é");
  CHECK(kTokenizerVersion == "tokenizer=v1");
}

TEST_CASE("levenshtein examples") {
  CHECK(levenshtein("kitten", "sitting") == 3);
  CHECK(levenshtein("", "abc") == 3);
  CHECK(levenshtein("abc", "abc") == 0);
  CHECK(levenshtein("flaw", "lawn") == 2);
  CHECK(levenshtein("é", "e") == 1);
}

TEST_CASE("levenshtein equals the recursive definition and is a metric") {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 3000; ++i) {
    const auto a = random_string(rng, 7);
    const auto b = random_string(rng, 7);
    const auto c = random_string(rng, 7);
    const auto ab = levenshtein(a, b);
    CHECK(ab == oracle::levenshtein_recursive(a, b));
    CHECK(ab == levenshtein(b, a));
    CHECK((ab == 0) == (a == b));
    CHECK(levenshtein(a, c) <= ab + levenshtein(b, c));
  }
}

TEST_CASE("BLEU hand case and edges") {
  const std::vector<BleuPair> hand{{words({"a", "b", "c", "d"}), {words({"a", "b", "c", "e"})}}};
  CHECK(std::abs(corpus_bleu(hand, {2, 0.0}) - std::sqrt(0.5)) < 1e-9);
  const std::vector<BleuPair> same{{words({"x", "y", "z", "w"}), {words({"x", "y", "z", "w"})}}};
  CHECK(corpus_bleu(same) == 1.0);
  const std::vector<BleuPair> disjoint{{words({"p", "q"}), {words({"r", "s"})}}};
  CHECK(corpus_bleu(disjoint, {2, 0.0}) == 0.0);
  CHECK_THROWS_AS(corpus_bleu(std::vector<BleuPair>{}), MetricError);
  CHECK_THROWS_AS(corpus_bleu(hand, {3, 0.0}), MetricError);
  const std::vector<BleuPair> mixed{{tokenize_chars("ab"), {words({"a", "b"})}}};
  try {
    corpus_bleu(mixed, {2, 0.0});
    FAIL("expected ModeMismatch");
  } catch (const MetricError& e) {
    CHECK(e.kind() == MetricError::Kind::ModeMismatch);
  }
  // Without smoothing a short corpus with no 4-gram match scores zero;
  // epsilon keeps it positive.
  const std::vector<BleuPair> short_pair{{words({"a", "b", "c"}), {words({"a", "b", "c"})}}};
  CHECK(corpus_bleu(short_pair, {4, 0.0}) == 0.0);
  CHECK(corpus_bleu(short_pair, {4, 1e-9}) > 0.0);
}

TEST_CASE("BLEU equals the definition on random corpora and ignores pair order") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<BleuPair> pairs;
    std::vector<oracle::BleuCase> cases;
    for (auto n = 1 + rng() % 6; n > 0; --n) {
      auto cand = random_tokens(rng, 10, 3);
      if (cand.empty()) cand.push_back("a");
      std::vector<std::vector<std::string>> refs;
      for (auto r = 1 + rng() % 3; r > 0; --r) {
        auto ref = random_tokens(rng, 10, 3);
        if (ref.empty()) ref.push_back("b");
        refs.push_back(ref);
      }
      BleuPair p{words(cand), {}};
      for (const auto& r : refs) p.references.push_back(words(r));
      pairs.push_back(p);
      cases.push_back({cand, refs});
    }
    for (int max_n : {2, 4}) {
      const double got = corpus_bleu(pairs, {max_n, 0.0});
      CHECK(got == doctest::Approx(oracle::corpus_bleu(cases, max_n)).epsilon(1e-12));
      CHECK(got >= 0.0);
      CHECK(got <= 1.0);
      auto shuffled = pairs;
      std::shuffle(shuffled.begin(), shuffled.end(), rng);
      CHECK(corpus_bleu(shuffled, {max_n, 0.0}) == doctest::Approx(got).epsilon(1e-12));
    }
  }
}

TEST_CASE("ROUGE examples") {
  const auto l = rouge(words({"the", "cat", "sat"}), words({"the", "cat", "ate"}), RougeVariant::L);
  CHECK(l.precision == doctest::Approx(2.0 / 3.0));
  CHECK(l.recall == doctest::Approx(2.0 / 3.0));
  CHECK(l.f1 == doctest::Approx(2.0 / 3.0));
  for (auto v : {RougeVariant::One, RougeVariant::Two, RougeVariant::L}) {
    CHECK(rouge(words({"a", "b", "c"}), words({"a", "b", "c"}), v).f1 == 1.0);
    CHECK(rouge(words({"a", "b"}), words({"c", "d"}), v).f1 == 0.0);
  }
  const auto empty = rouge(words({}), words({"a"}), RougeVariant::One);
  CHECK(empty.f1 == 0.0);
  CHECK(empty.support == 0);
  CHECK_THROWS_AS(rouge(words({"a"}), words({}), RougeVariant::L), MetricError);
  const auto r1 = rouge(words({"the"}), words({"the", "molecule", "is", "an", "acid"}), RougeVariant::One);
  CHECK(r1.recall == doctest::Approx(0.2));
  CHECK(r1.precision == 1.0);
}

TEST_CASE("ROUGE-L equals brute-force LCS; ROUGE-n swaps P and R") {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 1000; ++i) {
    auto a = random_tokens(rng, 12, 4);
    auto b = random_tokens(rng, 12, 4);
    if (b.empty()) b.push_back("a");
    const auto lcs = oracle::lcs_brute_force(a, b);
    CHECK(lcs_length(a, b) == lcs);
    if (a.empty()) continue;
    const auto l = rouge(words(a), words(b), RougeVariant::L);
    CHECK(l.precision == doctest::Approx(static_cast<double>(lcs) / a.size()));
    CHECK(l.recall == doctest::Approx(static_cast<double>(lcs) / b.size()));
    for (auto v : {RougeVariant::One, RougeVariant::Two}) {
      const auto ab = rouge(words(a), words(b), v);
      const auto ba = rouge(words(b), words(a), v);
      CHECK(ab.precision == doctest::Approx(ba.recall));
      CHECK(ab.f1 == doctest::Approx(ba.f1));
      CHECK(ab.f1 >= 0.0);
      CHECK(ab.f1 <= 1.0);
    }
  }
}

TEST_CASE("METEOR examples") {
  const auto swap = meteor_detail(words({"a", "b"}), words({"b", "a"}));
  CHECK(swap.matches == 2);
  CHECK(swap.chunks == 2);
  CHECK(swap.score == doctest::Approx(0.5));
  CHECK(meteor(words({"x"}), words({"y"})) == 0.0);
  const auto& caption = la3::testing::fixture_corpus().front().caption;
  const auto t = tokenize_words(caption);
  const auto self = meteor_detail(t, t);
  CHECK(self.chunks == 1);
  const double m = static_cast<double>(t.size());
  CHECK(self.score == doctest::Approx(1.0 - 0.5 / (m * m * m)).epsilon(1e-12));
  CHECK(self.score >= 0.999);
  CHECK_THROWS_AS(meteor(words({"a"}), words({})), MetricError);
  CHECK(meteor(words({}), words({"a"})) == 0.0);
}

TEST_CASE("METEOR equals exhaustive alignment search on short sequences") {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 1500; ++i) {
    const auto a = random_tokens(rng, 7, 3);
    auto b = random_tokens(rng, 7, 3);
    if (b.empty()) b.push_back("a");
    const double got = meteor(words(a), words(b));
    CHECK(got == doctest::Approx(oracle::meteor_exhaustive(a, b)).epsilon(1e-12));
    CHECK(got >= 0.0);
    CHECK(got <= 1.0);
  }
}
