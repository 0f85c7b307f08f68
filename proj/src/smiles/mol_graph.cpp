#include <algorithm>
#include <queue>
#include <set>
#include <utility>

#include "la3/smiles.hpp"

namespace la3::smiles {

int valence_contribution(BondOrder order) noexcept {
  switch (order) {
    case BondOrder::Single: return 1;
    case BondOrder::Double: return 2;
    case BondOrder::Triple: return 3;
    case BondOrder::Quadruple: return 4;
    case BondOrder::Aromatic: return 1;
  }
  return 1;
}

SmilesError::SmilesError(SmilesErrorKind kind, std::size_t position, const std::string& message)
    : DataError(position == std::string::npos
                    ? message
                    : message + " at position " + std::to_string(position)),
      kind_(kind),
      position_(position) {}

MolGraph::MolGraph(std::vector<Atom> atoms, std::vector<Bond> bonds)
    : atoms_(std::move(atoms)), bonds_(std::move(bonds)) {
  build_adjacency();
  perceive_rings();
  assign_implicit_hydrogens();
}

void MolGraph::build_adjacency() {
  const int n = atom_count();
  adjacency_.assign(static_cast<std::size_t>(n), {});
  std::set<std::pair<int, int>> seen;
  for (int b = 0; b < bond_count(); ++b) {
    const Bond& bond = bonds_[static_cast<std::size_t>(b)];
    if (bond.a < 0 || bond.b < 0 || bond.a >= n || bond.b >= n) {
      throw SmilesError(SmilesErrorKind::InvalidGraph, std::string::npos,
                        "bond " + std::to_string(b) + " has an endpoint outside the atom list");
    }
    if (bond.a == bond.b) {
      throw SmilesError(SmilesErrorKind::InvalidGraph, std::string::npos,
                        "bond " + std::to_string(b) + " is a self bond");
    }
    if (!seen.emplace(std::minmax(bond.a, bond.b)).second) {
      throw SmilesError(SmilesErrorKind::InvalidGraph, std::string::npos,
                        "duplicate bond between atoms " + std::to_string(bond.a) + " and " +
                            std::to_string(bond.b));
    }
    adjacency_[static_cast<std::size_t>(bond.a)].push_back({bond.b, b});
    adjacency_[static_cast<std::size_t>(bond.b)].push_back({bond.a, b});
  }

  component_.assign(static_cast<std::size_t>(n), -1);
  components_ = 0;
  for (int start = 0; start < n; ++start) {
    if (component_[static_cast<std::size_t>(start)] >= 0) continue;
    std::vector<int> stack{start};
    component_[static_cast<std::size_t>(start)] = components_;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (const Neighbor& nb : adjacency_[static_cast<std::size_t>(u)]) {
        if (component_[static_cast<std::size_t>(nb.atom)] < 0) {
          component_[static_cast<std::size_t>(nb.atom)] = components_;
          stack.push_back(nb.atom);
        }
      }
    }
    ++components_;
  }
}

void MolGraph::perceive_rings() {
  const int n = atom_count();
  const int m = bond_count();
  // Bridges via iterative Tarjan; every non-bridge is a ring bond.
  std::vector<int> disc(static_cast<std::size_t>(n), -1);
  std::vector<int> low(static_cast<std::size_t>(n), 0);
  bond_ring_.assign(static_cast<std::size_t>(m), true);
  int timer = 0;
  struct Frame {
    int atom;
    int parent_bond;
    std::size_t next;
  };
  for (int root = 0; root < n; ++root) {
    if (disc[static_cast<std::size_t>(root)] >= 0) continue;
    std::vector<Frame> stack{{root, -1, 0}};
    disc[static_cast<std::size_t>(root)] = low[static_cast<std::size_t>(root)] = timer++;
    while (!stack.empty()) {
      Frame& f = stack.back();
      const auto& adj = adjacency_[static_cast<std::size_t>(f.atom)];
      if (f.next < adj.size()) {
        const Neighbor nb = adj[f.next++];
        if (nb.bond == f.parent_bond) continue;
        const auto v = static_cast<std::size_t>(nb.atom);
        if (disc[v] < 0) {
          disc[v] = low[v] = timer++;
          stack.push_back({nb.atom, nb.bond, 0});
        } else {
          auto& lu = low[static_cast<std::size_t>(f.atom)];
          lu = std::min(lu, disc[v]);
        }
      } else {
        const Frame done = f;
        stack.pop_back();
        if (!stack.empty()) {
          const auto u = static_cast<std::size_t>(stack.back().atom);
          const auto v = static_cast<std::size_t>(done.atom);
          low[u] = std::min(low[u], low[v]);
          if (low[v] > disc[u]) bond_ring_[static_cast<std::size_t>(done.parent_bond)] = false;
        }
      }
    }
  }

  atom_ring_.assign(static_cast<std::size_t>(n), false);
  for (int b = 0; b < m; ++b) {
    if (!bond_ring_[static_cast<std::size_t>(b)]) continue;
    atom_ring_[static_cast<std::size_t>(bonds_[static_cast<std::size_t>(b)].a)] = true;
    atom_ring_[static_cast<std::size_t>(bonds_[static_cast<std::size_t>(b)].b)] = true;
  }

  // Shortest cycles through each ring bond: BFS distances from one end
  // without the bond itself, then every shortest path back from the other
  // end. Taking all of them (not one) keeps the ring set independent of atom
  // numbering.
  constexpr std::size_t kMaxCyclesPerBond = 256;
  bond_ring_size_.assign(static_cast<std::size_t>(m), 0);
  std::set<std::vector<int>> distinct;
  rings_.clear();
  std::vector<int> dist(static_cast<std::size_t>(n));
  for (int b = 0; b < m; ++b) {
    if (!bond_ring_[static_cast<std::size_t>(b)]) continue;
    const Bond& bond = bonds_[static_cast<std::size_t>(b)];
    std::fill(dist.begin(), dist.end(), -1);
    std::queue<int> q;
    q.push(bond.a);
    dist[static_cast<std::size_t>(bond.a)] = 0;
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (const Neighbor& nb : adjacency_[static_cast<std::size_t>(u)]) {
        if (nb.bond == b || !bond_ring_[static_cast<std::size_t>(nb.bond)]) continue;
        if (dist[static_cast<std::size_t>(nb.atom)] >= 0) continue;
        dist[static_cast<std::size_t>(nb.atom)] = dist[static_cast<std::size_t>(u)] + 1;
        q.push(nb.atom);
      }
    }
    const int length = dist[static_cast<std::size_t>(bond.b)];
    bond_ring_size_[static_cast<std::size_t>(b)] = length + 1;

    std::size_t found = 0;
    std::vector<int> path{bond.b};
    auto walk = [&](auto&& self, int u) -> void {
      if (found >= kMaxCyclesPerBond) return;
      if (u == bond.a) {
        ++found;
        std::vector<int> key = path;
        std::sort(key.begin(), key.end());
        if (distinct.insert(std::move(key)).second) rings_.push_back(path);
        return;
      }
      const int du = dist[static_cast<std::size_t>(u)];
      for (const Neighbor& nb : adjacency_[static_cast<std::size_t>(u)]) {
        if (nb.bond == b || !bond_ring_[static_cast<std::size_t>(nb.bond)]) continue;
        if (dist[static_cast<std::size_t>(nb.atom)] != du - 1) continue;
        path.push_back(nb.atom);
        self(self, nb.atom);
        path.pop_back();
      }
    };
    walk(walk, bond.b);
  }
}

void MolGraph::assign_implicit_hydrogens() {
  for (int i = 0; i < atom_count(); ++i) {
    Atom& a = atoms_[static_cast<std::size_t>(i)];
    if (a.bracket || a.atomic_number <= 0) {
      a.implicit_h = 0;
      continue;
    }
    a.implicit_h = default_implicit_h(a.atomic_number, a.aromatic, bond_order_sum(i));
  }
}

std::span<const Neighbor> MolGraph::neighbors(int atom) const {
  return adjacency_.at(static_cast<std::size_t>(atom));
}

int MolGraph::bond_order_sum(int atom) const {
  int sum = 0;
  for (const Neighbor& nb : neighbors(atom)) sum += valence_contribution(bond(nb.bond).order);
  return sum;
}

bool MolGraph::has_aromatic_bond(int atom) const {
  for (const Neighbor& nb : neighbors(atom)) {
    if (bond(nb.bond).order == BondOrder::Aromatic) return true;
  }
  return false;
}

int MolGraph::find_bond(int a, int b) const {
  for (const Neighbor& nb : neighbors(a)) {
    if (nb.atom == b) return nb.bond;
  }
  return -1;
}

}  // namespace la3::smiles
