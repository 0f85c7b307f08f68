#include <json.hpp>
#include <unordered_set>

#include "la3/dataset.hpp"
#include "la3/io.hpp"

namespace la3::dataset {

DatasetError::DatasetError(Kind kind, const std::string& what, std::size_t line)
    : DataError(line == 0 ? what : "line " + std::to_string(line) + ": " + what), kind_(kind), line_(line) {}

CorpusFormat format_for(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  return ext == ".jsonl" || ext == ".json" ? CorpusFormat::Jsonl : CorpusFormat::Tsv;
}

void check_record(const MoleculeRecord& r, std::size_t line) {
  auto fail = [&](const std::string& why) { throw DatasetError(DatasetError::Kind::MalformedRow, why, line); };
  if (r.id.empty()) fail("empty id");
  if (r.smiles.empty()) fail("empty SMILES");
  if (r.caption.empty()) fail("empty caption");
  if (r.smiles.find_first_of(" \t\r\n\v\f") != std::string::npos) fail("SMILES contains whitespace");
  if (r.caption.find_first_of("\t\n") != std::string::npos) fail("caption contains a tab or newline");
  if (r.id.find_first_of("\t\n") != std::string::npos) fail("id contains a tab or newline");
}

namespace {

std::vector<std::string_view> split_lines(std::string_view content) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < content.size()) {
    auto end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    auto line = content.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

std::vector<MoleculeRecord> parse_tsv(std::string_view content) {
  const auto lines = split_lines(content);
  if (lines.empty()) throw DatasetError(DatasetError::Kind::EmptyFile, "corpus file is empty");
  if (lines.front() != kTsvHeader) {
    throw DatasetError(DatasetError::Kind::MalformedRow, "expected header 'CID<TAB>SMILES<TAB>description'", 1);
  }
  std::vector<MoleculeRecord> records;
  records.reserve(lines.size() - 1);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto line = lines[i];
    const std::size_t lineno = i + 1;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string_view::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string_view::npos || line.find('\t', t2 + 1) != std::string_view::npos) {
      throw DatasetError(DatasetError::Kind::MalformedRow, "expected 3 tab-separated columns", lineno);
    }
    MoleculeRecord r{std::string(line.substr(0, t1)), std::string(line.substr(t1 + 1, t2 - t1 - 1)),
                     std::string(line.substr(t2 + 1))};
    check_record(r, lineno);
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<MoleculeRecord> parse_jsonl(std::string_view content) {
  const auto lines = split_lines(content);
  if (lines.empty()) throw DatasetError(DatasetError::Kind::EmptyFile, "corpus file is empty");
  std::vector<MoleculeRecord> records;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    MoleculeRecord r;
    try {
      const auto obj = nlohmann::json::parse(lines[i]);
      r = {obj.at("id").get<std::string>(), obj.at("smiles").get<std::string>(), obj.at("caption").get<std::string>()};
    } catch (const nlohmann::json::exception& e) {
      throw DatasetError(DatasetError::Kind::MalformedRow, e.what(), i + 1);
    }
    check_record(r, i + 1);
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace

std::vector<MoleculeRecord> parse_corpus(std::string_view content, CorpusFormat format) {
  auto records = format == CorpusFormat::Tsv ? parse_tsv(content) : parse_jsonl(content);
  std::unordered_set<std::string> ids;
  for (const auto& r : records) {
    if (!ids.insert(r.id).second) throw DatasetError(DatasetError::Kind::DuplicateId, "duplicate id '" + r.id + "'");
  }
  return records;
}

std::vector<MoleculeRecord> load_corpus(const std::filesystem::path& path, CorpusFormat format) {
  return parse_corpus(read_file(path), format);
}

std::vector<MoleculeRecord> load_corpus(const std::filesystem::path& path) {
  return load_corpus(path, format_for(path));
}

std::string format_corpus_tsv(const std::vector<MoleculeRecord>& records) {
  std::string out(kTsvHeader);
  out += '\n';
  for (const auto& r : records) {
    check_record(r);
    out += r.id + '\t' + r.smiles + '\t' + r.caption + '\n';
  }
  return out;
}

}  // namespace la3::dataset
