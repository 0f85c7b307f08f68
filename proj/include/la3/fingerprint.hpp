#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "la3/smiles.hpp"
#include "la3/substructure.hpp"

namespace la3::fingerprint {

enum class Family : std::uint8_t { Morgan, Path, Keys };

std::string_view to_string(Family f) noexcept;
Family family_from_string(std::string_view name);

inline constexpr std::size_t kDefaultWidth = 2048;
inline constexpr int kDefaultRadius = 2;
inline constexpr int kDefaultMaxPathLength = 7;
inline constexpr std::size_t kKeyCount = 166;

class FingerprintError : public DataError {
 public:
  using DataError::DataError;
};

/// Fixed-width bit vector tagged with the family and parameters it was built
/// with. Two fingerprints are comparable only when both tags agree.
class Fingerprint {
 public:
  Fingerprint(Family family, std::size_t width, std::string params);

  [[nodiscard]] Family family() const noexcept { return family_; }
  [[nodiscard]] const std::string& params() const noexcept { return params_; }
  [[nodiscard]] std::size_t width() const noexcept { return width_; }

  void set(std::size_t bit);
  [[nodiscard]] bool test(std::size_t bit) const;
  [[nodiscard]] std::size_t popcount() const noexcept;
  [[nodiscard]] std::vector<std::size_t> on_bits() const;
  [[nodiscard]] const std::vector<std::uint64_t>& words() const noexcept { return words_; }

  /// Little-endian bytes (bit 8j+k is bit k of byte j), two hex digits each.
  [[nodiscard]] std::string to_hex() const;

  friend bool operator==(const Fingerprint&, const Fingerprint&) = default;

 private:
  Family family_;
  std::size_t width_;
  std::string params_;
  std::vector<std::uint64_t> words_;
};

/// Circular (ECFP-style) fingerprint.
Fingerprint morgan_fp(const smiles::MolGraph& g, int radius = kDefaultRadius,
                      std::size_t width = kDefaultWidth);

/// Linear-path fingerprint over paths of 1..max_len bonds.
Fingerprint path_fp(const smiles::MolGraph& g, int max_len = kDefaultMaxPathLength,
                    std::size_t width = kDefaultWidth);

// ---- structural keys ---------------------------------------------------------

struct PatternKey {
  QueryGraph query;
  std::size_t min_count = 1;
};
struct IsotopeKey {};
struct ChargeKey {};
struct FragmentsKey {
  int min_components = 2;
};
struct RingSizeKey {
  int min_size = 3;
  int max_size = 0;  // 0: unbounded
  std::size_t min_count = 1;
};
struct AromaticRingsKey {
  std::size_t min_count = 1;
};
struct UnusedKey {};

using KeyPredicate =
    std::variant<UnusedKey, PatternKey, IsotopeKey, ChargeKey, FragmentsKey, RingSizeKey, AromaticRingsKey>;

struct StructuralKey {
  std::string description;
  KeyPredicate predicate;
};

/// 166 structural keys; bit i of a keys fingerprint is key i+1.
class StructuralKeyTable {
 public:
  StructuralKeyTable(std::string version, std::vector<StructuralKey> keys);

  /// Parses the JSON key-table format:
  ///   {"version": "...", "keys": [{"bit": 1, "description": "...",
  ///     "kind": "pattern"|"isotope"|"charge"|"fragments"|"ring_size"|
  ///             "aromatic_rings"|"unused", ...kind fields}]}
  static StructuralKeyTable from_json(std::string_view json_text);

  /// The table shipped with the library (data/la3_keys_v1.json).
  static const StructuralKeyTable& builtin();

  [[nodiscard]] const std::string& version() const noexcept { return version_; }
  [[nodiscard]] const std::vector<StructuralKey>& keys() const noexcept { return keys_; }

 private:
  std::string version_;
  std::vector<StructuralKey> keys_;
};

bool key_matches(const StructuralKey& key, const smiles::MolGraph& g);

Fingerprint keys_fp(const smiles::MolGraph& g,
                    const StructuralKeyTable& table = StructuralKeyTable::builtin());

/// |a & b| / |a | b|, 1.0 when both are empty. Throws FingerprintError when
/// family, width or parameters differ.
double tanimoto(const Fingerprint& a, const Fingerprint& b);

/// Valence-checks first; throws FingerprintError("invalid graph ...").
void require_valid(const smiles::MolGraph& g);

}  // namespace la3::fingerprint
