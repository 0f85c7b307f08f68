#include <json.hpp>
#include <random>
#include <unordered_map>
#include <unordered_set>

#include "la3/dataset.hpp"
#include "la3/io.hpp"

namespace la3::dataset {
namespace {

// Uniform in [0, bound) by rejection; mt19937_64 output is fixed by the
// standard, unlike the library distributions.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return x % bound;
}

void check_disjoint(const CorpusSplit& s) {
  std::unordered_set<std::string> seen;
  for (const auto* part : {&s.train, &s.valid, &s.test}) {
    for (const auto& id : *part) {
      if (!seen.insert(id).second) {
        throw DatasetError(DatasetError::Kind::MalformedSplit, "id '" + id + "' appears twice in split");
      }
    }
  }
}

}  // namespace

CorpusSplit make_split(const std::vector<std::string>& ids, std::uint64_t seed) {
  if (ids.empty()) throw DatasetError(DatasetError::Kind::EmptyCorpus, "cannot split an empty corpus");
  std::vector<std::string> order = ids;
  std::mt19937_64 rng(seed);
  for (std::size_t i = order.size() - 1; i > 0; --i) {
    std::swap(order[i], order[bounded(rng, i + 1)]);
  }
  const std::size_t n = order.size();
  const std::size_t n_train = n * 8 / 10;
  const std::size_t n_valid = n / 10;
  CorpusSplit s;
  s.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.valid.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train),
                 order.begin() + static_cast<std::ptrdiff_t>(n_train + n_valid));
  s.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train + n_valid), order.end());
  return s;
}

CorpusSplit make_split(const std::vector<MoleculeRecord>& corpus, std::uint64_t seed) {
  std::vector<std::string> ids;
  ids.reserve(corpus.size());
  for (const auto& r : corpus) ids.push_back(r.id);
  return make_split(ids, seed);
}

std::string split_to_json(const CorpusSplit& split) {
  nlohmann::ordered_json doc;
  doc["train"] = split.train;
  doc["valid"] = split.valid;
  doc["test"] = split.test;
  return doc.dump(1) + "\n";
}

CorpusSplit split_from_json(std::string_view json_text) {
  CorpusSplit s;
  try {
    const auto doc = nlohmann::json::parse(json_text);
    s.train = doc.at("train").get<std::vector<std::string>>();
    s.valid = doc.at("valid").get<std::vector<std::string>>();
    s.test = doc.at("test").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw DatasetError(DatasetError::Kind::MalformedSplit, std::string("malformed split file: ") + e.what());
  }
  check_disjoint(s);
  return s;
}

void save_split(const CorpusSplit& split, const std::filesystem::path& path) {
  write_file_atomic(path, split_to_json(split));
}

CorpusSplit load_split(const std::filesystem::path& path) { return split_from_json(read_file(path)); }

std::vector<MoleculeRecord> select(const std::vector<MoleculeRecord>& corpus, const std::vector<std::string>& ids) {
  std::unordered_map<std::string_view, const MoleculeRecord*> by_id;
  by_id.reserve(corpus.size());
  for (const auto& r : corpus) by_id.emplace(r.id, &r);
  std::vector<MoleculeRecord> out;
  out.reserve(ids.size());
  for (const auto& id : ids) {
    const auto it = by_id.find(id);
    if (it == by_id.end()) {
      throw DatasetError(DatasetError::Kind::MalformedSplit, "split id '" + id + "' not in corpus");
    }
    out.push_back(*it->second);
  }
  return out;
}

}  // namespace la3::dataset
