#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "la3/dataset.hpp"
#include "la3/error.hpp"

namespace la3::eval {

inline constexpr std::string_view kToolVersion = "la3 0.1.0";

enum class Task : std::uint8_t { Generation, Captioning };
std::string_view to_string(Task t) noexcept;
Task task_from_string(std::string_view s);

struct Prediction {
  std::string id;
  std::string text;
};

class EvalError : public DataError {
 public:
  enum class Kind { MissingPrediction, DuplicatePrediction, UnknownId, MalformedPrediction, MalformedReport };
  EvalError(Kind kind, const std::string& what) : DataError(what), kind_(kind) {}
  [[nodiscard]] Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// TSV `id<TAB>prediction`, one row per line; a first line equal to
/// "id<TAB>prediction" is a header. Empty predictions are allowed.
std::vector<Prediction> parse_predictions(std::string_view content);
std::vector<Prediction> load_predictions(const std::filesystem::path& path);
std::string format_predictions(const std::vector<Prediction>& rows);

// ---- external scorers ---------------------------------------------------------------

struct ExternalScorerSpec {
  std::string name;  // "fcd" or "text2mol"
  /// Executable and leading arguments; the input and output file paths are
  /// appended.
  std::vector<std::string> command;
};

struct ScorerPair {
  std::string id;
  std::string prediction;
  std::string reference;
};

class ScorerError : public ExternalError {
 public:
  enum class Kind { ScorerFailed, MalformedScorerOutput };
  ScorerError(Kind kind, const std::string& what, int exit_code = 0, std::string stderr_tail = {})
      : ExternalError(what), kind_(kind), exit_code_(exit_code), stderr_tail_(std::move(stderr_tail)) {}
  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  [[nodiscard]] int exit_code() const noexcept { return exit_code_; }
  [[nodiscard]] const std::string& stderr_tail() const noexcept { return stderr_tail_; }

 private:
  Kind kind_;
  int exit_code_;
  std::string stderr_tail_;
};

struct ScorerOutcome {
  std::optional<double> value;
  std::string provenance;      // command line that produced the value
  std::string skipped_reason;  // set when value is empty
};

/// Writes the pairs as JSONL {id, prediction, reference}, runs the command
/// with <input> <output> appended, and reads {"name", "value"} from the
/// output file. A command that cannot be found yields a skipped outcome;
/// a non-zero exit throws ScorerFailed, unreadable output
/// MalformedScorerOutput.
ScorerOutcome run_external_scorer(const ExternalScorerSpec& spec, const std::vector<ScorerPair>& pairs);

// ---- reports ------------------------------------------------------------------------

struct MetricEntry {
  std::string name;
  std::optional<double> value;  // empty: not computed
  std::size_t support = 0;
  std::string note;
  friend bool operator==(const MetricEntry&, const MetricEntry&) = default;
};

struct MetricReport {
  Task task = Task::Generation;
  std::vector<MetricEntry> metrics;  // in table column order
  std::map<std::string, std::string> versions;
  std::size_t pairs = 0;
  std::size_t valid = 0;          // generation only
  std::size_t fts_excluded = 0;   // generation only: invalid predictions left out of FTS means
  std::vector<std::string> notes;

  [[nodiscard]] const MetricEntry* find(std::string_view name) const;
  friend bool operator==(const MetricReport&, const MetricReport&) = default;
};

/// Column order of the generation and captioning tables.
const std::vector<std::string>& generation_columns();
const std::vector<std::string>& captioning_columns();

struct EvalOptions {
  std::vector<ExternalScorerSpec> scorers;
  /// Scorer failures throw instead of being recorded as skipped.
  bool strict_scorers = false;
  /// 0: one per hardware thread.
  unsigned threads = 0;
};

/// Pairs every reference record with its prediction. Throws EvalError when a
/// reference has no prediction, a prediction repeats, or names an id outside
/// the references.
std::vector<ScorerPair> align(const std::vector<Prediction>& predictions,
                              const std::vector<dataset::MoleculeRecord>& references, Task task);

/// Validity and Exact over all pairs; character BLEU-4 and mean Levenshtein
/// over all pairs; fingerprint Tanimoto means over pairs with a valid
/// prediction.
MetricReport eval_generation(const std::vector<Prediction>& predictions,
                             const std::vector<dataset::MoleculeRecord>& references, const EvalOptions& options = {});

/// Word-mode corpus BLEU-2/4; mean ROUGE-1/2/L F1; mean METEOR.
MetricReport eval_captioning(const std::vector<Prediction>& predictions,
                             const std::vector<dataset::MoleculeRecord>& references, const EvalOptions& options = {});

/// The test split of `corpus` is the reference set.
MetricReport evaluate(Task task, const std::vector<Prediction>& predictions,
                      const std::vector<dataset::MoleculeRecord>& corpus, const dataset::CorpusSplit& split,
                      const EvalOptions& options = {});

enum class ReportFormat : std::uint8_t { Json, Tsv, Markdown };
ReportFormat report_format_from_string(std::string_view s);

std::string render_report(const MetricReport& report, ReportFormat format);
MetricReport report_from_json(std::string_view json_text);

}  // namespace la3::eval
