#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "la3/smiles.hpp"

namespace la3::fingerprint {

/// One atom test inside a query. `value` is the atomic number for
/// Element/AtomicNumber, the hydrogen count for HCount.
struct AtomPrimitive {
  enum class Kind {
    Any,            // *
    Element,        // C, c, Cl, [Na] ... (aromaticity must agree)
    AtomicNumber,   // #n (either aromaticity)
    Aromatic,       // a
    Aliphatic,      // A
    Hetero,         // Q: not carbon, not hydrogen
    Halogen,        // X: F, Cl, Br, I
    HCount,         // Hn: total hydrogens exactly n
    InRing,         // R (or R0 negated)
  };
  Kind kind = Kind::Any;
  int value = 0;
  bool aromatic = false;
  bool negated = false;
};

/// Three precedence levels, as in SMARTS: low-AND (;) of ORs (,) of
/// high-ANDs (& or juxtaposition).
struct AtomQuery {
  std::vector<std::vector<std::vector<AtomPrimitive>>> terms;
};

struct BondPrimitive {
  enum class Kind { Single, Double, Triple, Aromatic, Any, InRing };
  Kind kind = Kind::Any;
  bool negated = false;
};

/// Conjunction of primitives; empty means "single or aromatic".
struct BondQuery {
  std::vector<BondPrimitive> all;
};

struct QueryBond {
  int a;
  int b;
  BondQuery query;
};

/// Small query graph written in a SMARTS-like line notation:
///   atoms   B C N O P S F Cl Br I, aromatic b c n o p s, * A a Q X, or
///           [expr] with primitives  symbol  #n  *  A  a  Q  X  Hn  R  R0
///           joined by ! & ; ,
///   bonds   - = # : ~ @ and ! for negation, concatenated primitives AND
///   rings   digits and %nn, branches ( )
class QueryGraph {
 public:
  static QueryGraph parse(std::string_view pattern);

  [[nodiscard]] const std::vector<AtomQuery>& atoms() const noexcept { return atoms_; }
  [[nodiscard]] const std::vector<QueryBond>& bonds() const noexcept { return bonds_; }
  [[nodiscard]] const std::string& source() const noexcept { return source_; }

 private:
  friend class QueryParser;
  std::vector<AtomQuery> atoms_;
  std::vector<QueryBond> bonds_;
  std::string source_;
};

class QueryError : public DataError {
 public:
  using DataError::DataError;
};

bool atom_matches(const AtomQuery& q, const smiles::MolGraph& g, int atom);
bool bond_matches(const BondQuery& q, const smiles::MolGraph& g, int bond);

/// True when the query embeds in g (non-induced subgraph, injective on atoms).
bool matches(const QueryGraph& query, const smiles::MolGraph& g);

/// Number of embeddings with distinct atom sets, counting stops at `limit`.
std::size_t count_unique_matches(const QueryGraph& query, const smiles::MolGraph& g,
                                 std::size_t limit = static_cast<std::size_t>(-1));

}  // namespace la3::fingerprint
