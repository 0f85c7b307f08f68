#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "la3/dataset.hpp"
#include "la3/provider.hpp"

namespace la3::augment {

// ---- prompts -------------------------------------------------------------------

struct PromptTemplate {
  std::string name;
  std::string instruction;
  /// Lines joined by '\n'; placeholders {SMILES}, {caption}, {description}.
  std::string message;
};

const PromptTemplate& molecule_caption_template();
const PromptTemplate& molecule_description_template();
const PromptTemplate& image_caption_template();
const std::vector<PromptTemplate>& builtin_templates();
const PromptTemplate& template_by_name(std::string_view name);

/// FNV-1a of name, instruction and message, as 16 hex digits.
std::string template_hash(const PromptTemplate& t);

class PromptError : public DataError {
 public:
  using DataError::DataError;
};

struct Prompt {
  std::string system;
  std::string user;
  /// system + "\n" + user
  [[nodiscard]] std::string text() const { return system + "\n" + user; }
};

/// Substitutes {SMILES} with the record's SMILES and {caption} or
/// {description} with its caption, in a single pass. Throws PromptError for
/// unknown placeholders, repeated placeholders, or empty record fields.
Prompt build_prompt(const PromptTemplate& t, const dataset::MoleculeRecord& record);

// ---- validation ------------------------------------------------------------------

struct ValidationPolicy {
  bool forbid_smiles_substring = true;
  bool forbid_linebreaks = true;
  std::size_t min_length = 5;    // word tokens
  std::size_t max_length = 512;  // word tokens
};

enum class RejectReason : std::uint8_t { Empty, SmilesLeak, Linebreak, TooShort, TooLong };
std::string_view to_string(RejectReason r) noexcept;

struct CaptionVerdict {
  std::string text;  // trimmed
  std::optional<RejectReason> reason;
  [[nodiscard]] bool accepted() const noexcept { return !reason.has_value(); }
};

/// Trims surrounding whitespace and quote characters, then rejects empty
/// text, line breaks or tabs (raw or as the escapes \n \r \t), text
/// containing the record's SMILES, and token counts outside the bounds.
CaptionVerdict validate_caption(std::string_view rewrite, const dataset::MoleculeRecord& record,
                                const ValidationPolicy& policy = {});

// ---- providers and jobs --------------------------------------------------------------

struct ProviderConfig {
  std::string name;
  std::string endpoint;
  std::string api_key_env;  // empty: no Authorization header
  std::string model;
  int max_concurrency = 1;
  int requests_per_minute = 60;
  int max_retries = 3;
  Duration timeout{60000};
  int rounds = 0;  // 0: assigned from k
  std::string response_path = "choices[0].message.content";
  double temperature = 0.7;
};

class ConfigError : public DataError {
 public:
  using DataError::DataError;
};

struct AugmentConfig {
  std::vector<ProviderConfig> providers;
  std::string template_name = "molecule_caption";
  std::optional<std::size_t> budget;
  ValidationPolicy validation;
};

/// JSON: {"providers": [{"name", "endpoint", "api_key_env", "model",
/// "max_concurrency", "requests_per_minute", "max_retries", "timeout_ms",
/// "rounds", "response_path", "temperature"}], "template", "budget",
/// "validation": {"min_length", "max_length"}}.
AugmentConfig parse_augment_config(std::string_view json_text);
AugmentConfig load_augment_config(const std::filesystem::path& path);

/// Fills unset round counts so they sum to k (round-robin over providers)
/// and checks that explicit counts sum to k.
void assign_rounds(std::vector<ProviderConfig>& providers, int k);

struct BackoffPolicy {
  Duration base{1000};
  double factor = 2.0;
  /// Delay for retry n is base * factor^(n-1) * (1 + jitter * u), u in [0, 1)
  /// derived from a hash of the request key.
  double jitter = 0.25;
};

using TransportFactory = std::function<std::shared_ptr<Transport>(const ProviderConfig&)>;

struct AugmentJob {
  std::vector<dataset::MoleculeRecord> corpus;
  dataset::CorpusSplit split;
  int k = 2;
  std::vector<ProviderConfig> providers;
  PromptTemplate prompt_template = molecule_caption_template();
  std::filesystem::path cache_dir;
  std::optional<std::size_t> budget;  // maximum network requests
  ValidationPolicy validation;
  BackoffPolicy backoff;
  bool dry_run = false;
  /// Ignore cached permanent failures and try those entries again.
  bool retry_failed = false;
};

struct FailureRecord {
  std::string id;
  std::string provider;
  int round = 0;
  std::string reason;
};

struct JobReport {
  std::size_t records = 0;
  std::size_t tasks = 0;
  std::size_t cached = 0;
  std::size_t fetched = 0;
  std::size_t rejected = 0;
  std::size_t failed = 0;
  std::size_t retries = 0;
  std::size_t requests = 0;
  std::size_t estimated_tokens = 0;
  /// Dry run only: requests a real run would send, assuming no retries.
  std::size_t planned_requests = 0;
  bool dry_run = false;
  std::vector<FailureRecord> failures;
  /// Records for which every task failed.
  std::vector<std::string> all_providers_failed;

  [[nodiscard]] std::string to_json() const;
};

struct JobResult {
  std::vector<dataset::AugmentedRecord> records;
  JobReport report;
};

class CacheCorrupt : public DataError {
 public:
  explicit CacheCorrupt(const std::filesystem::path& path, const std::string& why)
      : DataError("corrupt cache entry " + path.string() + ": " + why), path_(path) {}
  [[nodiscard]] const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
};

class BudgetExhausted : public ExternalError {
 public:
  BudgetExhausted(std::size_t budget, JobReport partial)
      : ExternalError("request budget of " + std::to_string(budget) + " exhausted"), partial_(std::move(partial)) {}
  [[nodiscard]] const JobReport& partial() const noexcept { return partial_; }

 private:
  JobReport partial_;
};

/// Rewrites every training record k times across the providers. Each
/// (record, provider, model, template, round) result, accepted or permanently
/// failed, is cached as one JSON file, so reruns send no repeat requests.
JobResult run_job(const AugmentJob& job, Clock& clock, const TransportFactory& transports);
JobResult run_job(const AugmentJob& job);

/// Cache file name for one task: FNV-1a of the key fields.
std::string cache_key(std::string_view id, std::string_view provider, std::string_view model,
                      std::string_view template_hash, int round);

/// Chat-completions request body for one attempt; `round` is sent as "seed".
std::string request_body(const ProviderConfig& provider, const Prompt& prompt, int round);

/// ceil(bytes / 4) of prompt plus response.
std::size_t estimate_tokens(std::string_view prompt, std::string_view response);

}  // namespace la3::augment
