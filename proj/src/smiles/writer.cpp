#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "la3/canonical.hpp"

namespace la3::smiles {
namespace {

bool organic_subset(const Atom& a) {
  static const std::set<std::string> kAliphatic = {"B", "C", "N", "O", "P", "S", "F", "Cl", "Br", "I", "*"};
  static const std::set<std::string> kAromatic = {"B", "C", "N", "O", "P", "S"};
  return a.aromatic ? kAromatic.count(a.element) > 0 : kAliphatic.count(a.element) > 0;
}

std::string atom_token(const MolGraph& g, int i) {
  const Atom& a = g.atom(i);
  std::string symbol = a.element;
  if (a.aromatic) {
    symbol[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(symbol[0])));
  }
  const int h = a.total_h();
  const bool plain = !a.isotope && a.charge == 0 && organic_subset(a) &&
                     (a.atomic_number == 0
                          ? h == 0
                          : default_implicit_h(a.atomic_number, a.aromatic, g.bond_order_sum(i)) == h);
  if (plain) return symbol;
  std::string out = "[";
  if (a.isotope) out += std::to_string(*a.isotope);
  out += symbol;
  if (h > 0) {
    out += 'H';
    if (h > 1) out += std::to_string(h);
  }
  if (a.charge != 0) {
    out += a.charge > 0 ? '+' : '-';
    if (std::abs(a.charge) > 1) out += std::to_string(std::abs(a.charge));
  }
  out += ']';
  return out;
}

std::string bond_token(const MolGraph& g, const Bond& b) {
  const bool both_aromatic = g.atom(b.a).aromatic && g.atom(b.b).aromatic;
  switch (b.order) {
    case BondOrder::Single: return both_aromatic ? "-" : "";
    case BondOrder::Double: return "=";
    case BondOrder::Triple: return "#";
    case BondOrder::Quadruple: return "$";
    case BondOrder::Aromatic: return both_aromatic ? "" : ":";
  }
  return "";
}

std::string ring_label(int digit) {
  return digit < 10 ? std::string(1, static_cast<char>('0' + digit)) : "%" + std::to_string(digit);
}

class Writer {
 public:
  Writer(const MolGraph& g, std::span<const int> ranks) : g_(g), ranks_(ranks) {
    const auto n = static_cast<std::size_t>(g.atom_count());
    visited_.assign(n, false);
    bond_used_.assign(static_cast<std::size_t>(g.bond_count()), false);
    children_.assign(n, {});
    closures_.assign(n, {});
    order_.assign(n, -1);
  }

  std::string run() {
    const int n = g_.atom_count();
    std::vector<int> by_rank(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) by_rank[static_cast<std::size_t>(i)] = i;
    std::sort(by_rank.begin(), by_rank.end(), [&](int x, int y) { return rank(x) < rank(y); });

    std::vector<std::string> components;
    for (int start : by_rank) {
      if (visited_[static_cast<std::size_t>(start)]) continue;
      plan(start);
      std::string out;
      open_digits_.clear();
      emit(start, -1, out);
      components.push_back(std::move(out));
    }
    std::sort(components.begin(), components.end());
    std::string joined;
    for (std::size_t i = 0; i < components.size(); ++i) {
      if (i) joined += '.';
      joined += components[i];
    }
    return joined;
  }

 private:
  int rank(int atom) const { return ranks_[static_cast<std::size_t>(atom)]; }

  std::vector<Neighbor> sorted_neighbors(int atom) const {
    auto nbs = g_.neighbors(atom);
    std::vector<Neighbor> out(nbs.begin(), nbs.end());
    std::sort(out.begin(), out.end(), [&](const Neighbor& x, const Neighbor& y) { return rank(x.atom) < rank(y.atom); });
    return out;
  }

  // DFS in rank order; records tree children and ring-closure bonds.
  void plan(int start) {
    struct Frame {
      int atom;
      int parent_bond;
      std::vector<Neighbor> nbs;
      std::size_t next;
    };
    std::vector<Frame> stack;
    visited_[static_cast<std::size_t>(start)] = true;
    order_[static_cast<std::size_t>(start)] = counter_++;
    stack.push_back({start, -1, sorted_neighbors(start), 0});
    while (!stack.empty()) {
      Frame& f = stack.back();
      if (f.next >= f.nbs.size()) {
        stack.pop_back();
        continue;
      }
      const Neighbor nb = f.nbs[f.next++];
      if (nb.bond == f.parent_bond || bond_used_[static_cast<std::size_t>(nb.bond)]) continue;
      bond_used_[static_cast<std::size_t>(nb.bond)] = true;
      if (visited_[static_cast<std::size_t>(nb.atom)]) {
        closures_[static_cast<std::size_t>(f.atom)].push_back(nb);
        closures_[static_cast<std::size_t>(nb.atom)].push_back({f.atom, nb.bond});
      } else {
        children_[static_cast<std::size_t>(f.atom)].push_back(nb);
        visited_[static_cast<std::size_t>(nb.atom)] = true;
        order_[static_cast<std::size_t>(nb.atom)] = counter_++;
        stack.push_back({nb.atom, nb.bond, sorted_neighbors(nb.atom), 0});
      }
    }
  }

  int take_digit() {
    for (int d = 1;; ++d) {
      if (!open_digits_.count(d)) {
        open_digits_.insert(d);
        return d;
      }
    }
  }

  void emit(int start, int via_bond, std::string& out) {
    struct Frame {
      int atom;
      std::size_t child;
    };
    std::vector<Frame> stack;
    auto open_atom = [&](int atom, int incoming) {
      if (incoming >= 0) out += bond_token(g_, g_.bond(incoming));
      out += atom_token(g_, atom);
      auto closures = closures_[static_cast<std::size_t>(atom)];
      // Closing digits first (partner already written), then openings; each
      // group in the order partners were reached.
      std::sort(closures.begin(), closures.end(), [&](const Neighbor& x, const Neighbor& y) {
        const bool xc = order_[static_cast<std::size_t>(x.atom)] < order_[static_cast<std::size_t>(atom)];
        const bool yc = order_[static_cast<std::size_t>(y.atom)] < order_[static_cast<std::size_t>(atom)];
        if (xc != yc) return xc;
        return order_[static_cast<std::size_t>(x.atom)] < order_[static_cast<std::size_t>(y.atom)];
      });
      for (const Neighbor& c : closures) {
        const bool closing = order_[static_cast<std::size_t>(c.atom)] < order_[static_cast<std::size_t>(atom)];
        if (closing) {
          const int digit = digit_of_bond_.at(c.bond);
          out += bond_token(g_, g_.bond(c.bond));
          out += ring_label(digit);
          open_digits_.erase(digit);
        } else {
          const int digit = take_digit();
          digit_of_bond_[c.bond] = digit;
          out += ring_label(digit);
        }
      }
    };
    open_atom(start, via_bond);
    stack.push_back({start, 0});
    while (!stack.empty()) {
      Frame& f = stack.back();
      const auto& kids = children_[static_cast<std::size_t>(f.atom)];
      if (f.child >= kids.size()) {
        stack.pop_back();
        if (!stack.empty()) {
          const Frame& parent = stack.back();
          // Every child but the last was opened as a parenthesized branch.
          if (parent.child < children_[static_cast<std::size_t>(parent.atom)].size()) out += ')';
        }
        continue;
      }
      const std::size_t idx = f.child++;
      const Neighbor kid = kids[idx];
      if (idx + 1 < kids.size()) out += '(';
      open_atom(kid.atom, kid.bond);
      stack.push_back({kid.atom, 0});
    }
  }

  const MolGraph& g_;
  std::span<const int> ranks_;
  std::vector<bool> visited_;
  std::vector<bool> bond_used_;
  std::vector<std::vector<Neighbor>> children_;
  std::vector<std::vector<Neighbor>> closures_;
  std::vector<int> order_;
  int counter_ = 0;
  std::set<int> open_digits_;
  std::map<int, int> digit_of_bond_;
};

}  // namespace

std::string write_smiles(const MolGraph& g, std::span<const int> ranks) {
  if (static_cast<int>(ranks.size()) != g.atom_count()) {
    throw SmilesError(SmilesErrorKind::InvalidGraph, std::string::npos, "rank vector size mismatch");
  }
  return Writer(g, ranks).run();
}

}  // namespace la3::smiles
