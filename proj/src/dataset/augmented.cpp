#include <json.hpp>

#include "la3/dataset.hpp"
#include "la3/io.hpp"

namespace la3::dataset {
namespace {

using OrderedJson = nlohmann::ordered_json;

void check_rewrite(const AugmentedRecord& r, const CaptionRewrite& w, std::size_t line) {
  auto fail = [&](const std::string& why) { throw DatasetError(DatasetError::Kind::MalformedLine, why, line); };
  if (w.text.empty()) fail("rewrite text is empty");
  if (w.text.find(r.base.smiles) != std::string::npos) fail("rewrite contains the record's SMILES");
  if (w.round < 1) fail("rewrite round must be >= 1");
}

}  // namespace

std::string augmented_to_jsonl_line(const AugmentedRecord& record) {
  check_record(record.base);
  OrderedJson obj;
  obj["id"] = record.base.id;
  obj["smiles"] = record.base.smiles;
  obj["caption"] = record.base.caption;
  obj["rewrites"] = OrderedJson::array();
  for (const auto& w : record.rewrites) {
    check_rewrite(record, w, 0);
    OrderedJson rw;
    rw["text"] = w.text;
    rw["provider"] = w.provider;
    rw["round"] = w.round;
    rw["created_at"] = w.created_at;
    obj["rewrites"].push_back(std::move(rw));
  }
  return obj.dump(-1, ' ', false, nlohmann::json::error_handler_t::strict);
}

std::string format_augmented(const std::vector<AugmentedRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    out += augmented_to_jsonl_line(r);
    out += '\n';
  }
  return out;
}

std::vector<AugmentedRecord> parse_augmented(std::string_view content) {
  std::vector<AugmentedRecord> records;
  std::size_t start = 0;
  std::size_t lineno = 0;
  while (start < content.size()) {
    auto end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    const auto line = content.substr(start, end - start);
    start = end + 1;
    ++lineno;
    if (line.empty()) continue;
    AugmentedRecord r;
    try {
      const auto obj = nlohmann::json::parse(line);
      r.base = {obj.at("id").get<std::string>(), obj.at("smiles").get<std::string>(),
                obj.at("caption").get<std::string>()};
      for (const auto& rw : obj.at("rewrites")) {
        r.rewrites.push_back({rw.at("text").get<std::string>(), rw.at("provider").get<std::string>(),
                              rw.at("round").get<int>(), rw.at("created_at").get<std::string>()});
      }
    } catch (const nlohmann::json::exception& e) {
      throw DatasetError(DatasetError::Kind::MalformedLine, e.what(), lineno);
    }
    try {
      check_record(r.base, lineno);
    } catch (const DatasetError& e) {
      throw DatasetError(DatasetError::Kind::MalformedLine, e.what(), 0);
    }
    for (const auto& w : r.rewrites) check_rewrite(r, w, lineno);
    records.push_back(std::move(r));
  }
  return records;
}

void save_augmented(const std::vector<AugmentedRecord>& records, const std::filesystem::path& path) {
  write_file_atomic(path, format_augmented(records));
}

std::vector<AugmentedRecord> load_augmented(const std::filesystem::path& path) {
  return parse_augmented(read_file(path));
}

}  // namespace la3::dataset
