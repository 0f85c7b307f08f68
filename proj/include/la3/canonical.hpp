#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "la3/smiles.hpp"

namespace la3::smiles {

/// Canonical rank (a permutation of 0..n-1) for every atom.
///
/// Atoms are first partitioned by local invariants (degree, element, isotope,
/// charge, hydrogen count, ring membership, aromaticity) and the partition is
/// refined by neighbor ranks and bond orders until stable. Remaining ties are
/// broken by individualizing each member of the first non-trivial class in
/// turn and keeping the labeling with the smallest graph certificate; equal
/// certificates yield automorphisms that prune symmetric branches.
/// Stereo marks are ignored.
std::vector<int> canonical_ranks(const MolGraph& g);

/// Writes SMILES visiting atoms in ascending `ranks` order. Stereo marks and
/// atom classes are not emitted. Components are sorted lexicographically and
/// joined with '.'.
std::string write_smiles(const MolGraph& g, std::span<const int> ranks);

/// Deterministic canonical SMILES. Throws SmilesError(InvalidGraph) when the
/// graph fails the valence check.
std::string canonicalize(const MolGraph& g);

/// Parse then canonicalize.
std::string canonical_smiles(std::string_view smiles);

/// Relabeled copy: atom i of `g` becomes atom perm[i]. Bond list order is
/// permuted too (sorted by new endpoints) so nothing of the old numbering
/// survives.
MolGraph permute(const MolGraph& g, std::span<const int> perm);

/// Isomorphism test by canonical-string equality.
bool same_molecule(const MolGraph& a, const MolGraph& b);

/// Valid pair test: true iff both parse, pass valence, and share a canonical
/// form. Throws DataError("invalid ground truth ...") when `truth` is invalid.
bool exact_match(std::string_view prediction, std::string_view truth);

}  // namespace la3::smiles
