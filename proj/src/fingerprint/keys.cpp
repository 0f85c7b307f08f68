#include <algorithm>
#include <json.hpp>
#include <string>
#include <utility>

#include "la3/fingerprint.hpp"

namespace la3::fingerprint {
namespace {

constexpr char kBuiltinKeysJson[] =
#include "la3_keys_v1.inc"
    ;

using Json = nlohmann::json;

std::size_t count_field(const Json& entry, const char* name, std::size_t fallback) {
  if (!entry.contains(name)) return fallback;
  const auto v = entry.at(name).get<long long>();
  if (v < 1) throw FingerprintError(std::string("key field '") + name + "' must be positive");
  return static_cast<std::size_t>(v);
}

KeyPredicate parse_predicate(const Json& entry) {
  const auto kind = entry.at("kind").get<std::string>();
  if (kind == "unused") return UnusedKey{};
  if (kind == "pattern") {
    return PatternKey{QueryGraph::parse(entry.at("pattern").get<std::string>()), count_field(entry, "min_count", 1)};
  }
  if (kind == "isotope") return IsotopeKey{};
  if (kind == "charge") return ChargeKey{};
  if (kind == "fragments") return FragmentsKey{static_cast<int>(count_field(entry, "min_components", 2))};
  if (kind == "ring_size") {
    RingSizeKey k;
    k.min_size = entry.value("min_size", 3);
    k.max_size = entry.value("max_size", 0);
    k.min_count = count_field(entry, "min_count", 1);
    if (k.min_size < 3 || (k.max_size != 0 && k.max_size < k.min_size)) {
      throw FingerprintError("bad ring size bounds");
    }
    return k;
  }
  if (kind == "aromatic_rings") return AromaticRingsKey{count_field(entry, "min_count", 1)};
  throw FingerprintError("unknown key kind '" + kind + "'");
}

}  // namespace

StructuralKeyTable::StructuralKeyTable(std::string version, std::vector<StructuralKey> keys)
    : version_(std::move(version)), keys_(std::move(keys)) {
  if (keys_.size() != kKeyCount) {
    throw FingerprintError("key table must have " + std::to_string(kKeyCount) + " entries, got " +
                           std::to_string(keys_.size()));
  }
  if (version_.empty()) throw FingerprintError("key table version is empty");
}

StructuralKeyTable StructuralKeyTable::from_json(std::string_view json_text) {
  Json doc;
  try {
    doc = Json::parse(json_text);
  } catch (const Json::exception& e) {
    throw FingerprintError(std::string("key table is not valid JSON: ") + e.what());
  }
  std::vector<StructuralKey> keys;
  try {
    const auto& entries = doc.at("keys");
    keys.reserve(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const auto& entry = entries[i];
      if (entry.at("bit").get<std::size_t>() != i + 1) {
        throw FingerprintError("key table entry " + std::to_string(i) + " is out of order");
      }
      keys.push_back({entry.value("description", std::string{}), parse_predicate(entry)});
    }
    return {doc.at("version").get<std::string>(), std::move(keys)};
  } catch (const Json::exception& e) {
    throw FingerprintError(std::string("malformed key table: ") + e.what());
  }
}

const StructuralKeyTable& StructuralKeyTable::builtin() {
  static const StructuralKeyTable table = from_json(kBuiltinKeysJson);
  return table;
}

bool key_matches(const StructuralKey& key, const smiles::MolGraph& g) {
  struct Visitor {
    const smiles::MolGraph& g;
    bool operator()(const UnusedKey&) const { return false; }
    bool operator()(const PatternKey& k) const {
      return count_unique_matches(k.query, g, k.min_count) >= k.min_count;
    }
    bool operator()(const IsotopeKey&) const {
      return std::any_of(g.atoms().begin(), g.atoms().end(), [](const auto& a) { return a.isotope.has_value(); });
    }
    bool operator()(const ChargeKey&) const {
      return std::any_of(g.atoms().begin(), g.atoms().end(), [](const auto& a) { return a.charge != 0; });
    }
    bool operator()(const FragmentsKey& k) const { return g.component_count() >= k.min_components; }
    bool operator()(const RingSizeKey& k) const {
      const auto n = std::count_if(g.rings().begin(), g.rings().end(), [&](const auto& ring) {
        const int size = static_cast<int>(ring.size());
        return size >= k.min_size && (k.max_size == 0 || size <= k.max_size);
      });
      return static_cast<std::size_t>(n) >= k.min_count;
    }
    bool operator()(const AromaticRingsKey& k) const {
      const auto n = std::count_if(g.rings().begin(), g.rings().end(), [&](const auto& ring) {
        return std::all_of(ring.begin(), ring.end(), [&](int a) { return g.atom(a).aromatic; });
      });
      return static_cast<std::size_t>(n) >= k.min_count;
    }
  };
  return std::visit(Visitor{g}, key.predicate);
}

Fingerprint keys_fp(const smiles::MolGraph& g, const StructuralKeyTable& table) {
  require_valid(g);
  Fingerprint fp(Family::Keys, kKeyCount, "table=" + table.version());
  for (std::size_t i = 0; i < table.keys().size(); ++i) {
    if (key_matches(table.keys()[i], g)) fp.set(i);
  }
  return fp;
}

}  // namespace la3::fingerprint
