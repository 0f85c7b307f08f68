#include "la3/canonical.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <optional>
#include <tuple>
#include <utility>

namespace la3::smiles {
namespace {

using Partition = std::vector<int>;  // class index per atom, dense from 0

int bond_code(BondOrder order) { return static_cast<int>(order) + 1; }

// Rerank atoms by an arbitrary comparable key; equal keys share a class.
template <typename Key>
Partition rank_by(const std::vector<Key>& keys) {
  const std::size_t n = keys.size();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int x, int y) { return keys[static_cast<std::size_t>(x)] < keys[static_cast<std::size_t>(y)]; });
  Partition p(n, 0);
  int cls = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0 && keys[static_cast<std::size_t>(order[i - 1])] < keys[static_cast<std::size_t>(order[i])]) ++cls;
    p[static_cast<std::size_t>(order[i])] = cls;
  }
  return p;
}

int class_count(const Partition& p) {
  return p.empty() ? 0 : *std::max_element(p.begin(), p.end()) + 1;
}

using AtomInvariant = std::array<int, 7>;

AtomInvariant atom_invariant(const MolGraph& g, int i) {
  const Atom& a = g.atom(i);
  // Degree first so that traversal starts from a terminal atom.
  return {g.degree(i), a.atomic_number, a.isotope.value_or(0), a.charge,
          a.total_h(), g.atom_in_ring(i) ? 1 : 0, a.aromatic ? 1 : 0};
}

class Canonicalizer {
 public:
  explicit Canonicalizer(const MolGraph& g) : g_(g), n_(g.atom_count()) {}

  std::vector<int> run() {
    if (n_ == 0) return {};
    std::vector<AtomInvariant> inv(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) inv[static_cast<std::size_t>(i)] = atom_invariant(g_, i);
    invariants_ = inv;
    Partition root = refine(rank_by(inv));

    std::vector<int> path;
    leaves_ = 0;
    search(root, path);
    if (leaves_ > kLeafBudget) {
      // Tree too large: fall back to first-member individualization, which
      // is numbering-independent whenever refinement classes are orbits.
      Partition p = root;
      while (class_count(p) < n_) p = refine(individualize(p, first_tied_member(p)));
      return p;
    }
    return best_labels_;
  }

 private:
  static constexpr long kLeafBudget = 20000;

  Partition refine(Partition p) const {
    int classes = class_count(p);
    std::vector<std::pair<int, std::vector<std::pair<int, int>>>> keys(static_cast<std::size_t>(n_));
    while (true) {
      for (int i = 0; i < n_; ++i) {
        auto& key = keys[static_cast<std::size_t>(i)];
        key.first = p[static_cast<std::size_t>(i)];
        key.second.clear();
        for (const Neighbor& nb : g_.neighbors(i)) {
          key.second.emplace_back(p[static_cast<std::size_t>(nb.atom)], bond_code(g_.bond(nb.bond).order));
        }
        std::sort(key.second.begin(), key.second.end());
      }
      Partition next = rank_by(keys);
      const int next_classes = class_count(next);
      if (next_classes == classes) return p;
      p = std::move(next);
      classes = next_classes;
    }
  }

  // First (lowest-ranked) class with more than one member.
  int first_tied_class(const Partition& p) const {
    std::vector<int> size(static_cast<std::size_t>(n_), 0);
    for (int c : p) ++size[static_cast<std::size_t>(c)];
    for (int c = 0; c < n_; ++c) {
      if (size[static_cast<std::size_t>(c)] > 1) return c;
    }
    return -1;
  }

  int first_tied_member(const Partition& p) const {
    const int cls = first_tied_class(p);
    for (int i = 0; i < n_; ++i) {
      if (p[static_cast<std::size_t>(i)] == cls) return i;
    }
    return -1;
  }

  Partition individualize(const Partition& p, int atom) const {
    std::vector<std::pair<int, int>> keys(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) keys[static_cast<std::size_t>(i)] = {p[static_cast<std::size_t>(i)], i == atom ? 0 : 1};
    return rank_by(keys);
  }

  std::vector<int> certificate(const Partition& labels) const {
    std::vector<int> atom_at(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) atom_at[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])] = i;
    std::vector<int> cert;
    cert.reserve(static_cast<std::size_t>(n_) * 7 + static_cast<std::size_t>(g_.bond_count()) * 3);
    for (int l = 0; l < n_; ++l) {
      const auto& inv = invariants_[static_cast<std::size_t>(atom_at[static_cast<std::size_t>(l)])];
      cert.insert(cert.end(), inv.begin(), inv.end());
    }
    std::vector<std::array<int, 3>> edges;
    edges.reserve(static_cast<std::size_t>(g_.bond_count()));
    for (const Bond& b : g_.bonds()) {
      const int x = labels[static_cast<std::size_t>(b.a)];
      const int y = labels[static_cast<std::size_t>(b.b)];
      edges.push_back({std::min(x, y), std::max(x, y), bond_code(b.order)});
    }
    std::sort(edges.begin(), edges.end());
    for (const auto& e : edges) cert.insert(cert.end(), e.begin(), e.end());
    return cert;
  }

  // Candidates of `cls` that are not images of an already explored candidate
  // under automorphisms fixing every atom individualized on `path`.
  bool pruned(int candidate, const std::vector<int>& explored, const std::vector<int>& path) const {
    if (explored.empty() || automorphisms_.empty()) return false;
    std::vector<int> parent(static_cast<std::size_t>(n_));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
      while (parent[static_cast<std::size_t>(x)] != x) {
        parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
        x = parent[static_cast<std::size_t>(x)];
      }
      return x;
    };
    bool any = false;
    for (const auto& gamma : automorphisms_) {
      bool fixes = true;
      for (int v : path) {
        if (gamma[static_cast<std::size_t>(v)] != v) {
          fixes = false;
          break;
        }
      }
      if (!fixes) continue;
      any = true;
      for (int i = 0; i < n_; ++i) {
        const int a = find(i);
        const int b = find(gamma[static_cast<std::size_t>(i)]);
        if (a != b) parent[static_cast<std::size_t>(a)] = b;
      }
    }
    if (!any) return false;
    const int root = find(candidate);
    for (int e : explored) {
      if (find(e) == root) return true;
    }
    return false;
  }

  void search(const Partition& p, std::vector<int>& path) {
    if (leaves_ > kLeafBudget) return;
    const int cls = first_tied_class(p);
    if (cls < 0) {
      ++leaves_;
      std::vector<int> cert = certificate(p);
      if (best_labels_.empty() || cert < best_cert_) {
        best_cert_ = std::move(cert);
        best_labels_ = p;
      } else if (cert == best_cert_) {
        // best_labels_[j] == p[gamma(j)] defines an automorphism gamma.
        std::vector<int> atom_at_best(static_cast<std::size_t>(n_));
        for (int j = 0; j < n_; ++j) atom_at_best[static_cast<std::size_t>(best_labels_[static_cast<std::size_t>(j)])] = j;
        std::vector<int> gamma(static_cast<std::size_t>(n_));
        for (int i = 0; i < n_; ++i) gamma[static_cast<std::size_t>(i)] = atom_at_best[static_cast<std::size_t>(p[static_cast<std::size_t>(i)])];
        bool identity = true;
        for (int i = 0; i < n_ && identity; ++i) identity = gamma[static_cast<std::size_t>(i)] == i;
        if (!identity) automorphisms_.push_back(std::move(gamma));
      }
      return;
    }
    std::vector<int> explored;
    for (int atom = 0; atom < n_; ++atom) {
      if (p[static_cast<std::size_t>(atom)] != cls) continue;
      if (pruned(atom, explored, path)) continue;
      explored.push_back(atom);
      path.push_back(atom);
      search(refine(individualize(p, atom)), path);
      path.pop_back();
      if (leaves_ > kLeafBudget) return;
    }
  }

  const MolGraph& g_;
  int n_;
  std::vector<AtomInvariant> invariants_;
  long leaves_ = 0;
  std::vector<int> best_cert_;
  Partition best_labels_;
  std::vector<std::vector<int>> automorphisms_;
};

}  // namespace

std::vector<int> canonical_ranks(const MolGraph& g) { return Canonicalizer(g).run(); }

std::string canonicalize(const MolGraph& g) {
  const ValidityVerdict verdict = check_valence(g);
  if (!verdict.valid) {
    throw SmilesError(SmilesErrorKind::InvalidGraph, std::string::npos,
                      "cannot canonicalize invalid graph: " + verdict.detail);
  }
  const std::vector<int> ranks = canonical_ranks(g);
  return write_smiles(g, ranks);
}

std::string canonical_smiles(std::string_view smiles) { return canonicalize(parse(smiles)); }

MolGraph permute(const MolGraph& g, std::span<const int> perm) {
  const int n = g.atom_count();
  if (static_cast<int>(perm.size()) != n) {
    throw SmilesError(SmilesErrorKind::InvalidGraph, std::string::npos, "permutation size mismatch");
  }
  std::vector<Atom> atoms(static_cast<std::size_t>(n));
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (int i = 0; i < n; ++i) {
    const int to = perm[static_cast<std::size_t>(i)];
    if (to < 0 || to >= n || seen[static_cast<std::size_t>(to)]) {
      throw SmilesError(SmilesErrorKind::InvalidGraph, std::string::npos, "not a permutation");
    }
    seen[static_cast<std::size_t>(to)] = true;
    atoms[static_cast<std::size_t>(to)] = g.atom(i);
  }
  std::vector<Bond> bonds;
  bonds.reserve(g.bonds().size());
  for (const Bond& b : g.bonds()) {
    Bond nb = b;
    nb.a = perm[static_cast<std::size_t>(b.a)];
    nb.b = perm[static_cast<std::size_t>(b.b)];
    if (nb.a > nb.b) std::swap(nb.a, nb.b);
    bonds.push_back(nb);
  }
  std::sort(bonds.begin(), bonds.end(),
            [](const Bond& x, const Bond& y) { return std::tie(x.a, x.b) < std::tie(y.a, y.b); });
  return MolGraph(std::move(atoms), std::move(bonds));
}

bool same_molecule(const MolGraph& a, const MolGraph& b) {
  if (a.atom_count() != b.atom_count() || a.bond_count() != b.bond_count()) return false;
  return canonicalize(a) == canonicalize(b);
}

bool exact_match(std::string_view prediction, std::string_view truth) {
  std::string truth_canonical;
  try {
    truth_canonical = canonical_smiles(truth);
  } catch (const SmilesError& e) {
    throw DataError("invalid ground truth '" + std::string(truth) + "': " + e.what());
  }
  try {
    return canonical_smiles(prediction) == truth_canonical;
  } catch (const SmilesError&) {
    return false;
  }
}

}  // namespace la3::smiles
