#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "la3/error.hpp"

namespace la3::smiles {

enum class BondOrder : std::uint8_t { Single, Double, Triple, Quadruple, Aromatic };

/// Integer contribution of a bond to valence; aromatic bonds count as one.
int valence_contribution(BondOrder order) noexcept;

/// Directional single-bond marks (`/` and `\`). Parsed and carried, never ranked.
enum class BondStereo : std::uint8_t { None, Up, Down };

struct Atom {
  std::string element;          // periodic-table symbol, "*" for a wildcard
  int atomic_number = 0;
  std::optional<int> isotope;
  int charge = 0;
  std::optional<int> explicit_h;  // bracket atoms only
  bool aromatic = false;
  bool bracket = false;
  std::string chirality;        // raw token, e.g. "@@"; empty when absent
  std::optional<int> atom_class;
  int implicit_h = 0;           // filled in for organic-subset atoms

  [[nodiscard]] int total_h() const noexcept { return explicit_h.value_or(0) + implicit_h; }
  friend bool operator==(const Atom&, const Atom&) = default;
};

struct Bond {
  int a = 0;
  int b = 0;
  BondOrder order = BondOrder::Single;
  BondStereo stereo = BondStereo::None;

  [[nodiscard]] int other(int atom) const noexcept { return atom == a ? b : a; }
  friend bool operator==(const Bond&, const Bond&) = default;
};

struct Neighbor {
  int atom;
  int bond;
};

/// Immutable molecular graph. Construction enforces the structural invariants
/// (valid endpoints, no self bonds, no parallel bonds) and derives ring
/// membership and implicit hydrogens for organic-subset atoms.
class MolGraph {
 public:
  MolGraph() = default;
  MolGraph(std::vector<Atom> atoms, std::vector<Bond> bonds);

  [[nodiscard]] const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  [[nodiscard]] const std::vector<Bond>& bonds() const noexcept { return bonds_; }
  [[nodiscard]] const Atom& atom(int i) const { return atoms_.at(static_cast<std::size_t>(i)); }
  [[nodiscard]] const Bond& bond(int i) const { return bonds_.at(static_cast<std::size_t>(i)); }
  [[nodiscard]] int atom_count() const noexcept { return static_cast<int>(atoms_.size()); }
  [[nodiscard]] int bond_count() const noexcept { return static_cast<int>(bonds_.size()); }

  [[nodiscard]] std::span<const Neighbor> neighbors(int atom) const;
  [[nodiscard]] int degree(int atom) const { return static_cast<int>(neighbors(atom).size()); }
  /// Sum of valence contributions of all incident bonds.
  [[nodiscard]] int bond_order_sum(int atom) const;
  [[nodiscard]] bool has_aromatic_bond(int atom) const;
  /// Index of the bond joining a and b, or -1.
  [[nodiscard]] int find_bond(int a, int b) const;

  [[nodiscard]] bool atom_in_ring(int atom) const { return atom_ring_.at(static_cast<std::size_t>(atom)); }
  [[nodiscard]] bool bond_in_ring(int bond) const { return bond_ring_.at(static_cast<std::size_t>(bond)); }
  [[nodiscard]] int component_of(int atom) const { return component_.at(static_cast<std::size_t>(atom)); }
  [[nodiscard]] int component_count() const noexcept { return components_; }

  /// Length of the shortest cycle through each ring bond (0 for chain bonds).
  [[nodiscard]] const std::vector<int>& smallest_ring_through_bond() const noexcept { return bond_ring_size_; }

  /// Distinct shortest cycles through each ring bond (numbering-independent
  /// set). Each entry lists atoms in ring order.
  [[nodiscard]] const std::vector<std::vector<int>>& rings() const noexcept { return rings_; }

  friend bool operator==(const MolGraph& x, const MolGraph& y) {
    return x.atoms_ == y.atoms_ && x.bonds_ == y.bonds_;
  }

 private:
  void build_adjacency();
  void perceive_rings();
  void assign_implicit_hydrogens();

  std::vector<Atom> atoms_;
  std::vector<Bond> bonds_;
  std::vector<std::vector<Neighbor>> adjacency_;
  std::vector<bool> atom_ring_;
  std::vector<bool> bond_ring_;
  std::vector<int> bond_ring_size_;
  std::vector<std::vector<int>> rings_;
  std::vector<int> component_;
  int components_ = 0;
};

enum class SmilesErrorKind : std::uint8_t {
  Grammar,
  UnclosedRing,
  UnmatchedParen,
  UnknownElement,
  RingClosure,   // self bond or duplicate bond introduced by a ring label
  InvalidGraph,  // structural or valence violation on an already-built graph
};

class SmilesError : public DataError {
 public:
  SmilesError(SmilesErrorKind kind, std::size_t position, const std::string& message);

  [[nodiscard]] SmilesErrorKind kind() const noexcept { return kind_; }
  /// Byte offset into the input; npos when not tied to a position.
  [[nodiscard]] std::size_t position() const noexcept { return position_; }

 private:
  SmilesErrorKind kind_;
  std::size_t position_;
};

/// Recursive-descent SMILES parser. Never aborts: returns a graph or throws
/// SmilesError carrying the offending byte offset.
MolGraph parse(std::string_view smiles);

// ---- periodic table -------------------------------------------------------

/// Atomic number for a symbol ("Cl" -> 17), 0 for "*", -1 when unknown.
int atomic_number(std::string_view symbol) noexcept;
/// Symbol for an atomic number in 1..118, "*" for 0.
std::string_view element_symbol(int atomic_number);

// ---- valence ---------------------------------------------------------------

inline constexpr std::string_view kValenceTableVersion = "valence-v1";

/// Allowed valences for an element in a charge state. Empty means the element
/// is not covered by the table and is accepted with any valence.
std::span<const int> allowed_valences(int atomic_number, int charge);

/// Hydrogen count the parser assigns to an organic-subset atom with the given
/// incident bonds.
int default_implicit_h(int atomic_number, bool aromatic, int bond_order_sum);

enum class InvalidReason : std::uint8_t { Grammar, RingClosure, Valence };

std::string_view to_string(InvalidReason reason) noexcept;

struct ValidityVerdict {
  bool valid = true;
  std::optional<InvalidReason> reason;
  std::string detail;

  static ValidityVerdict ok() { return {}; }
  static ValidityVerdict fail(InvalidReason r, std::string detail) {
    return ValidityVerdict{false, r, std::move(detail)};
  }
};

ValidityVerdict check_valence(const MolGraph& g);

/// Parse + valence check; never throws.
ValidityVerdict is_valid(std::string_view smiles);

}  // namespace la3::smiles
