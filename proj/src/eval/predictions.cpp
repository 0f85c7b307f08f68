#include <unordered_map>
#include <unordered_set>

#include "la3/evalharness.hpp"
#include "la3/io.hpp"

namespace la3::eval {

std::string_view to_string(Task t) noexcept { return t == Task::Generation ? "gen" : "cap"; }

Task task_from_string(std::string_view s) {
  if (s == "gen" || s == "generation") return Task::Generation;
  if (s == "cap" || s == "captioning") return Task::Captioning;
  throw EvalError(EvalError::Kind::MalformedReport, "unknown task '" + std::string(s) + "'");
}

std::vector<Prediction> parse_predictions(std::string_view content) {
  std::vector<Prediction> rows;
  std::size_t start = 0;
  std::size_t lineno = 0;
  while (start < content.size()) {
    auto end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    auto line = content.substr(start, end - start);
    start = end + 1;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (lineno == 1 && line == "id\tprediction") continue;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos || tab == 0 || line.find('\t', tab + 1) != std::string_view::npos) {
      throw EvalError(EvalError::Kind::MalformedPrediction,
                      "line " + std::to_string(lineno) + ": expected 'id<TAB>prediction'");
    }
    rows.push_back({std::string(line.substr(0, tab)), std::string(line.substr(tab + 1))});
  }
  return rows;
}

std::vector<Prediction> load_predictions(const std::filesystem::path& path) {
  return parse_predictions(read_file(path));
}

std::string format_predictions(const std::vector<Prediction>& rows) {
  std::string out = "id\tprediction\n";
  for (const auto& r : rows) out += r.id + '\t' + r.text + '\n';
  return out;
}

std::vector<ScorerPair> align(const std::vector<Prediction>& predictions,
                              const std::vector<dataset::MoleculeRecord>& references, Task task) {
  std::unordered_map<std::string_view, const Prediction*> by_id;
  by_id.reserve(predictions.size());
  for (const auto& p : predictions) {
    if (!by_id.emplace(p.id, &p).second) {
      throw EvalError(EvalError::Kind::DuplicatePrediction, "duplicate prediction for id '" + p.id + "'");
    }
  }
  std::unordered_set<std::string_view> ref_ids;
  std::vector<ScorerPair> pairs;
  pairs.reserve(references.size());
  for (const auto& r : references) {
    ref_ids.insert(r.id);
    const auto it = by_id.find(r.id);
    if (it == by_id.end()) throw EvalError(EvalError::Kind::MissingPrediction, "no prediction for id '" + r.id + "'");
    pairs.push_back({r.id, it->second->text, task == Task::Generation ? r.smiles : r.caption});
  }
  for (const auto& p : predictions) {
    if (!ref_ids.contains(p.id)) {
      throw EvalError(EvalError::Kind::UnknownId, "prediction id '" + p.id + "' is not in the evaluation split");
    }
  }
  return pairs;
}

}  // namespace la3::eval
