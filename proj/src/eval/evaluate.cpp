#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "la3/canonical.hpp"
#include "la3/evalharness.hpp"
#include "la3/fingerprint.hpp"
#include "la3/textmetrics.hpp"

namespace la3::eval {
namespace {

namespace fp = la3::fingerprint;

/// Runs body(i) for i in [0, n) on a small thread pool; the first exception
/// is rethrown on the caller.
template <typename Body>
void parallel_for(std::size_t n, unsigned threads, Body body) {
  unsigned workers = threads != 0 ? threads : std::max(1U, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      try {
        for (std::size_t i = next++; i < n; i = next++) body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = n;
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

double mean(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

std::map<std::string, std::string> versions() {
  return {{"key_table", fp::StructuralKeyTable::builtin().version()},
          {"tokenizer", std::string(text::kTokenizerVersion)},
          {"tool", std::string(kToolVersion)},
          {"valence_table", std::string(smiles::kValenceTableVersion)}};
}

void attach_scorers(MetricReport& report, const std::vector<ScorerPair>& pairs, const EvalOptions& options) {
  for (auto& entry : report.metrics) {
    const bool external = entry.name == "FCD" || entry.name == "Text2Mol";
    if (!external) continue;
    std::string key = entry.name == "FCD" ? "fcd" : "text2mol";
    const auto spec = std::find_if(options.scorers.begin(), options.scorers.end(),
                                   [&](const ExternalScorerSpec& s) { return s.name == key; });
    if (spec == options.scorers.end()) {
      entry.note = "skipped: no " + key + " scorer configured";
      continue;
    }
    try {
      const auto outcome = run_external_scorer(*spec, pairs);
      if (outcome.value) {
        entry.value = outcome.value;
        entry.support = pairs.size();
        entry.note = "external: " + outcome.provenance;
      } else {
        entry.note = "skipped: " + outcome.skipped_reason;
      }
    } catch (const ScorerError& e) {
      if (options.strict_scorers) throw;
      entry.note = std::string("skipped: ") + e.what();
    }
  }
}

struct GenPair {
  bool valid = false;
  bool exact = false;
  std::size_t levenshtein = 0;
  double maccs = 0.0;
  double rdk = 0.0;
  double morgan = 0.0;
};

}  // namespace

const std::vector<std::string>& generation_columns() {
  static const std::vector<std::string> cols{"BLEU",    "Exact",      "Levenshtein", "MACCS FTS", "RDK FTS",
                                             "Morgan FTS", "FCD", "Text2Mol", "Validity"};
  return cols;
}

const std::vector<std::string>& captioning_columns() {
  static const std::vector<std::string> cols{"BLEU-2", "BLEU-4", "ROUGE-1", "ROUGE-2",
                                             "ROUGE-L", "METEOR", "Text2Mol"};
  return cols;
}

const MetricEntry* MetricReport::find(std::string_view name) const {
  for (const auto& m : metrics) {
    if (m.name == name) return &m;
  }
  return nullptr;
}

MetricReport eval_generation(const std::vector<Prediction>& predictions,
                             const std::vector<dataset::MoleculeRecord>& references, const EvalOptions& options) {
  const auto pairs = align(predictions, references, Task::Generation);
  std::vector<GenPair> results(pairs.size());
  std::vector<text::BleuPair> bleu_pairs(pairs.size());

  parallel_for(pairs.size(), options.threads, [&](std::size_t i) {
    const auto& p = pairs[i];
    auto& r = results[i];
    bleu_pairs[i] = {text::tokenize_chars(p.prediction), {text::tokenize_chars(p.reference)}};
    r.levenshtein = text::levenshtein(p.prediction, p.reference);

    const auto truth = smiles::parse(p.reference);
    if (const auto v = smiles::check_valence(truth); !v.valid) {
      throw DataError("invalid ground truth for id '" + p.id + "': " + v.detail);
    }
    std::optional<smiles::MolGraph> pred;
    try {
      pred = smiles::parse(p.prediction);
      if (!smiles::check_valence(*pred).valid) pred.reset();
    } catch (const smiles::SmilesError&) {
      pred.reset();
    }
    if (!pred || pred->atom_count() == 0) return;
    r.valid = true;
    r.exact = smiles::canonicalize(*pred) == smiles::canonicalize(truth);
    r.maccs = fp::tanimoto(fp::keys_fp(*pred), fp::keys_fp(truth));
    r.rdk = fp::tanimoto(fp::path_fp(*pred), fp::path_fp(truth));
    r.morgan = fp::tanimoto(fp::morgan_fp(*pred), fp::morgan_fp(truth));
  });

  MetricReport report;
  report.task = Task::Generation;
  report.versions = versions();
  report.pairs = pairs.size();
  std::vector<double> exact, lev, maccs, rdk, morgan;
  for (const auto& r : results) {
    exact.push_back(r.exact ? 1.0 : 0.0);
    lev.push_back(static_cast<double>(r.levenshtein));
    if (r.valid) {
      ++report.valid;
      maccs.push_back(r.maccs);
      rdk.push_back(r.rdk);
      morgan.push_back(r.morgan);
    }
  }
  report.fts_excluded = report.pairs - report.valid;
  const std::size_t n = report.pairs;
  const double validity = n == 0 ? 0.0 : static_cast<double>(report.valid) / static_cast<double>(n);
  const double bleu = n == 0 ? 0.0 : text::corpus_bleu(bleu_pairs, {4, 0.0});
  report.metrics = {
      {"BLEU", bleu, n, "character-level, corpus BLEU-4"},
      {"Exact", mean(exact), n, "canonical SMILES match; invalid predictions count as misses"},
      {"Levenshtein", mean(lev), n, "mean per-pair character edit distance"},
      {"MACCS FTS", mean(maccs), report.valid, "structural keys, valid predictions only"},
      {"RDK FTS", mean(rdk), report.valid, "linear paths up to 7 bonds, valid predictions only"},
      {"Morgan FTS", mean(morgan), report.valid, "radius 2, 2048 bits, valid predictions only"},
      {"FCD", std::nullopt, 0, {}},
      {"Text2Mol", std::nullopt, 0, {}},
      {"Validity", validity, n, {}},
  };
  if (report.fts_excluded > 0) {
    report.notes.push_back(std::to_string(report.fts_excluded) +
                           " invalid predictions excluded from FTS means; included in BLEU and Levenshtein");
  }
  attach_scorers(report, pairs, options);
  return report;
}

MetricReport eval_captioning(const std::vector<Prediction>& predictions,
                             const std::vector<dataset::MoleculeRecord>& references, const EvalOptions& options) {
  const auto pairs = align(predictions, references, Task::Captioning);
  std::vector<text::BleuPair> bleu_pairs(pairs.size());
  std::vector<double> r1(pairs.size()), r2(pairs.size()), rl(pairs.size()), met(pairs.size());
  parallel_for(pairs.size(), options.threads, [&](std::size_t i) {
    auto cand = text::tokenize_words(pairs[i].prediction);
    auto ref = text::tokenize_words(pairs[i].reference);
    r1[i] = text::rouge(cand, ref, text::RougeVariant::One).f1;
    r2[i] = text::rouge(cand, ref, text::RougeVariant::Two).f1;
    rl[i] = text::rouge(cand, ref, text::RougeVariant::L).f1;
    met[i] = text::meteor(cand, ref);
    bleu_pairs[i] = {std::move(cand), {std::move(ref)}};
  });

  MetricReport report;
  report.task = Task::Captioning;
  report.versions = versions();
  report.pairs = pairs.size();
  const std::size_t n = pairs.size();
  const double bleu2 = n == 0 ? 0.0 : text::corpus_bleu(bleu_pairs, {2, 0.0});
  const double bleu4 = n == 0 ? 0.0 : text::corpus_bleu(bleu_pairs, {4, 0.0});
  report.metrics = {
      {"BLEU-2", bleu2, n, "word-level corpus BLEU"},
      {"BLEU-4", bleu4, n, "word-level corpus BLEU"},
      {"ROUGE-1", mean(r1), n, "mean F1"},
      {"ROUGE-2", mean(r2), n, "mean F1"},
      {"ROUGE-L", mean(rl), n, "mean F1"},
      {"METEOR", mean(met), n, "exact-match stage, alpha 0.9, beta 3, gamma 0.5"},
      {"Text2Mol", std::nullopt, 0, {}},
  };
  attach_scorers(report, pairs, options);
  return report;
}

MetricReport evaluate(Task task, const std::vector<Prediction>& predictions,
                      const std::vector<dataset::MoleculeRecord>& corpus, const dataset::CorpusSplit& split,
                      const EvalOptions& options) {
  const auto references = dataset::select(corpus, split.test);
  return task == Task::Generation ? eval_generation(predictions, references, options)
                                  : eval_captioning(predictions, references, options);
}

}  // namespace la3::eval
