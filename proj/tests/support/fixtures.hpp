#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "la3/canonical.hpp"
#include "la3/dataset.hpp"
#include "la3/smiles.hpp"

namespace la3::testing {

inline std::string data_path(const std::string& name) { return std::string(LA3_TEST_DATA_DIR) + "/" + name; }

/// Real molecules with ChEBI-style captions.
inline const std::vector<dataset::MoleculeRecord>& fixture_corpus() {
  static const auto corpus = dataset::load_corpus(data_path("molecules.tsv"));
  return corpus;
}

inline std::vector<int> random_permutation(int n, std::mt19937_64& rng) {
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  return perm;
}

/// The same molecule written from a random atom order.
inline std::string random_smiles(const smiles::MolGraph& g, std::mt19937_64& rng) {
  return smiles::write_smiles(g, random_permutation(g.atom_count(), rng));
}

/// n records drawn from the fixture molecules, each SMILES written from a
/// fresh random atom order so strings differ from their canonical forms.
inline std::vector<dataset::MoleculeRecord> synthetic_corpus(std::size_t n, std::uint64_t seed) {
  const auto& base = fixture_corpus();
  std::vector<smiles::MolGraph> graphs;
  graphs.reserve(base.size());
  for (const auto& r : base) graphs.push_back(smiles::parse(r.smiles));
  std::mt19937_64 rng(seed);
  std::vector<dataset::MoleculeRecord> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto j = i % base.size();
    out.push_back({"S" + std::to_string(i), random_smiles(graphs[j], rng), base[j].caption});
  }
  return out;
}

}  // namespace la3::testing
