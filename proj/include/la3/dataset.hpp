#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "la3/error.hpp"

namespace la3::dataset {

struct MoleculeRecord {
  std::string id;
  std::string smiles;
  std::string caption;
  friend bool operator==(const MoleculeRecord&, const MoleculeRecord&) = default;
};

struct CaptionRewrite {
  std::string text;
  std::string provider;
  int round = 1;
  std::string created_at;  // UTC, "YYYY-MM-DDTHH:MM:SSZ"
  friend bool operator==(const CaptionRewrite&, const CaptionRewrite&) = default;
};

struct AugmentedRecord {
  MoleculeRecord base;
  std::vector<CaptionRewrite> rewrites;
  friend bool operator==(const AugmentedRecord&, const AugmentedRecord&) = default;
};

struct CorpusSplit {
  std::vector<std::string> train;
  std::vector<std::string> valid;
  std::vector<std::string> test;
  friend bool operator==(const CorpusSplit&, const CorpusSplit&) = default;
};

enum class CorpusFormat : std::uint8_t { Tsv, Jsonl };

/// Guesses from the extension: ".jsonl"/".json" is JSONL, anything else TSV.
CorpusFormat format_for(const std::filesystem::path& path);

class DatasetError : public DataError {
 public:
  enum class Kind { MalformedRow, DuplicateId, EmptyFile, EmptyCorpus, MalformedLine, MalformedSplit };
  DatasetError(Kind kind, const std::string& what, std::size_t line = 0);
  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  /// 1-based line number, 0 when not tied to a line.
  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  Kind kind_;
  std::size_t line_;
};

inline constexpr std::string_view kTsvHeader = "CID\tSMILES\tdescription";

/// TSV needs the header row above; JSONL lines are {"id", "smiles",
/// "caption"} objects. Records keep file order.
std::vector<MoleculeRecord> parse_corpus(std::string_view content, CorpusFormat format);
std::vector<MoleculeRecord> load_corpus(const std::filesystem::path& path, CorpusFormat format);
std::vector<MoleculeRecord> load_corpus(const std::filesystem::path& path);

std::string format_corpus_tsv(const std::vector<MoleculeRecord>& records);

/// Throws DatasetError(MalformedRow) when a record breaks the field rules.
void check_record(const MoleculeRecord& r, std::size_t line = 0);

/// Seeded Fisher-Yates over the corpus order, then floor(0.8n) train,
/// floor(0.1n) valid, remainder test.
CorpusSplit make_split(const std::vector<MoleculeRecord>& corpus, std::uint64_t seed);
CorpusSplit make_split(const std::vector<std::string>& ids, std::uint64_t seed);

std::string split_to_json(const CorpusSplit& split);
CorpusSplit split_from_json(std::string_view json_text);
void save_split(const CorpusSplit& split, const std::filesystem::path& path);
CorpusSplit load_split(const std::filesystem::path& path);

/// Records whose id is listed, in the order of `ids`. Throws
/// DatasetError(MalformedSplit) when an id is missing from the corpus.
std::vector<MoleculeRecord> select(const std::vector<MoleculeRecord>& corpus, const std::vector<std::string>& ids);

/// One JSON object per line, keys in the order id, smiles, caption, rewrites
/// and text, provider, round, created_at inside each rewrite.
std::string augmented_to_jsonl_line(const AugmentedRecord& record);
std::string format_augmented(const std::vector<AugmentedRecord>& records);
std::vector<AugmentedRecord> parse_augmented(std::string_view content);
void save_augmented(const std::vector<AugmentedRecord>& records, const std::filesystem::path& path);
std::vector<AugmentedRecord> load_augmented(const std::filesystem::path& path);

}  // namespace la3::dataset
