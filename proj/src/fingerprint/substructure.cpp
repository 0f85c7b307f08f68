#include "la3/substructure.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>

namespace la3::fingerprint {

using smiles::BondOrder;
using smiles::MolGraph;

class QueryParser {
 public:
  explicit QueryParser(std::string_view text) : text_(text) {}

  QueryGraph run() {
    QueryGraph q;
    q.source_ = std::string(text_);
    if (text_.empty()) fail("empty pattern");
    int prev = -1;
    std::optional<BondQuery> pending;
    std::vector<int> branches;
    std::map<int, std::pair<int, std::optional<BondQuery>>> rings;

    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '(') {
        if (prev < 0) fail("branch without atom");
        branches.push_back(prev);
        ++pos_;
      } else if (c == ')') {
        if (branches.empty()) fail("unmatched ')'");
        prev = branches.back();
        branches.pop_back();
        ++pos_;
      } else if (is_bond_start(c)) {
        if (pending) fail("consecutive bonds");
        pending = parse_bond();
      } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '%') {
        int label;
        if (c == '%') {
          if (pos_ + 2 >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])) ||
              !std::isdigit(static_cast<unsigned char>(text_[pos_ + 2]))) {
            fail("bad ring label");
          }
          label = (text_[pos_ + 1] - '0') * 10 + (text_[pos_ + 2] - '0');
          pos_ += 3;
        } else {
          label = c - '0';
          ++pos_;
        }
        if (prev < 0) fail("ring label without atom");
        auto it = rings.find(label);
        if (it == rings.end()) {
          rings[label] = {prev, pending};
        } else {
          BondQuery bq = pending ? *pending : it->second.second.value_or(BondQuery{});
          q.bonds_.push_back({it->second.first, prev, bq});
          rings.erase(it);
        }
        pending.reset();
      } else {
        AtomQuery atom = c == '[' ? parse_bracket() : parse_bare();
        q.atoms_.push_back(std::move(atom));
        const int idx = static_cast<int>(q.atoms_.size()) - 1;
        if (prev >= 0) q.bonds_.push_back({prev, idx, pending.value_or(BondQuery{})});
        pending.reset();
        prev = idx;
      }
    }
    if (!branches.empty()) fail("unclosed '('");
    if (!rings.empty()) fail("unclosed ring label");
    if (pending) fail("dangling bond");
    return q;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw QueryError("pattern '" + std::string(text_) + "': " + msg + " at " + std::to_string(pos_));
  }

  static bool is_bond_start(char c) {
    return c == '-' || c == '=' || c == '#' || c == ':' || c == '~' || c == '@' || c == '!';
  }

  BondQuery parse_bond() {
    BondQuery q;
    bool negate = false;
    while (pos_ < text_.size() && is_bond_start(text_[pos_])) {
      const char c = text_[pos_++];
      if (c == '!') {
        negate = !negate;
        continue;
      }
      BondPrimitive p;
      switch (c) {
        case '-': p.kind = BondPrimitive::Kind::Single; break;
        case '=': p.kind = BondPrimitive::Kind::Double; break;
        case '#': p.kind = BondPrimitive::Kind::Triple; break;
        case ':': p.kind = BondPrimitive::Kind::Aromatic; break;
        case '~': p.kind = BondPrimitive::Kind::Any; break;
        default: p.kind = BondPrimitive::Kind::InRing; break;
      }
      p.negated = negate;
      negate = false;
      q.all.push_back(p);
    }
    if (negate) fail("dangling '!' in bond");
    return q;
  }

  static AtomQuery single(AtomPrimitive p) {
    AtomQuery q;
    q.terms.push_back({{p}});
    return q;
  }

  AtomQuery parse_bare() {
    const char c = text_[pos_];
    const char next = pos_ + 1 < text_.size() ? text_[pos_ + 1] : '\0';
    AtomPrimitive p;
    if (c == 'C' && next == 'l') {
      p = {AtomPrimitive::Kind::Element, 17, false, false};
      pos_ += 2;
      return single(p);
    }
    if (c == 'B' && next == 'r') {
      p = {AtomPrimitive::Kind::Element, 35, false, false};
      pos_ += 2;
      return single(p);
    }
    ++pos_;
    switch (c) {
      case '*': p.kind = AtomPrimitive::Kind::Any; break;
      case 'A': p.kind = AtomPrimitive::Kind::Aliphatic; break;
      case 'a': p.kind = AtomPrimitive::Kind::Aromatic; break;
      case 'Q': p.kind = AtomPrimitive::Kind::Hetero; break;
      case 'X': p.kind = AtomPrimitive::Kind::Halogen; break;
      case 'B': case 'C': case 'N': case 'O': case 'P': case 'S': case 'F': case 'I':
        p = {AtomPrimitive::Kind::Element, smiles::atomic_number(std::string(1, c)), false, false};
        break;
      case 'b': case 'c': case 'n': case 'o': case 'p': case 's':
        p = {AtomPrimitive::Kind::Element,
             smiles::atomic_number(std::string(1, static_cast<char>(std::toupper(c)))), true, false};
        break;
      default:
        --pos_;
        fail(std::string("unexpected character '") + c + "'");
    }
    return single(p);
  }

  AtomQuery parse_bracket() {
    ++pos_;  // '['
    AtomQuery q;
    std::vector<std::vector<AtomPrimitive>> ors;
    std::vector<AtomPrimitive> ands;
    bool negate = false;
    auto push = [&](AtomPrimitive p) {
      p.negated = negate;
      negate = false;
      ands.push_back(p);
    };
    while (true) {
      if (pos_ >= text_.size()) fail("unterminated bracket");
      const char c = text_[pos_];
      if (c == ']') {
        ++pos_;
        break;
      }
      if (c == '!') {
        negate = !negate;
        ++pos_;
        continue;
      }
      if (c == '&') {
        ++pos_;
        continue;
      }
      if (c == ',' || c == ';') {
        if (ands.empty() || negate) fail("empty operand");
        ors.push_back(std::move(ands));
        ands.clear();
        if (c == ';') {
          q.terms.push_back(std::move(ors));
          ors.clear();
        }
        ++pos_;
        continue;
      }
      if (c == '#') {
        ++pos_;
        push({AtomPrimitive::Kind::AtomicNumber, read_int(), false, false});
      } else if (c == 'H') {
        ++pos_;
        const int n = peek_digit() ? read_int() : 1;
        push({AtomPrimitive::Kind::HCount, n, false, false});
      } else if (c == 'R') {
        ++pos_;
        AtomPrimitive p{AtomPrimitive::Kind::InRing, 0, false, false};
        if (peek_digit()) {
          if (read_int() != 0) fail("only R and R0 are supported");
          negate = !negate;
        }
        push(p);
      } else if (c == '*') {
        ++pos_;
        push({AtomPrimitive::Kind::Any, 0, false, false});
      } else if (c == 'a') {
        ++pos_;
        push({AtomPrimitive::Kind::Aromatic, 0, false, false});
      } else if (c == 'A') {
        ++pos_;
        push({AtomPrimitive::Kind::Aliphatic, 0, false, false});
      } else if (c == 'Q') {
        ++pos_;
        push({AtomPrimitive::Kind::Hetero, 0, false, false});
      } else if (c == 'X') {
        ++pos_;
        push({AtomPrimitive::Kind::Halogen, 0, false, false});
      } else if (std::isupper(static_cast<unsigned char>(c))) {
        std::string sym(1, c);
        if (pos_ + 1 < text_.size() && std::islower(static_cast<unsigned char>(text_[pos_ + 1])) &&
            smiles::atomic_number(std::string{c, text_[pos_ + 1]}) > 0) {
          sym += text_[pos_ + 1];
        }
        const int z = smiles::atomic_number(sym);
        if (z <= 0) fail("unknown element '" + sym + "'");
        pos_ += sym.size();
        push({AtomPrimitive::Kind::Element, z, false, false});
      } else if (c == 'c' || c == 'n' || c == 'o' || c == 's' || c == 'p' || c == 'b') {
        ++pos_;
        push({AtomPrimitive::Kind::Element,
              smiles::atomic_number(std::string(1, static_cast<char>(std::toupper(c)))), true, false});
      } else {
        fail(std::string("unexpected character '") + c + "' in bracket");
      }
    }
    if (ands.empty() || negate) fail("empty bracket expression");
    ors.push_back(std::move(ands));
    q.terms.push_back(std::move(ors));
    return q;
  }

  bool peek_digit() const {
    return pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]));
  }

  int read_int() {
    if (!peek_digit()) fail("expected digits");
    int v = 0;
    while (peek_digit()) v = v * 10 + (text_[pos_++] - '0');
    return v;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

QueryGraph QueryGraph::parse(std::string_view pattern) { return QueryParser(pattern).run(); }

namespace {

bool primitive_matches(const AtomPrimitive& p, const MolGraph& g, int i) {
  const smiles::Atom& a = g.atom(i);
  bool r = false;
  switch (p.kind) {
    case AtomPrimitive::Kind::Any: r = true; break;
    case AtomPrimitive::Kind::Element: r = a.atomic_number == p.value && a.aromatic == p.aromatic; break;
    case AtomPrimitive::Kind::AtomicNumber: r = a.atomic_number == p.value; break;
    case AtomPrimitive::Kind::Aromatic: r = a.aromatic; break;
    case AtomPrimitive::Kind::Aliphatic: r = !a.aromatic; break;
    case AtomPrimitive::Kind::Hetero: r = a.atomic_number != 6 && a.atomic_number != 1; break;
    case AtomPrimitive::Kind::Halogen:
      r = a.atomic_number == 9 || a.atomic_number == 17 || a.atomic_number == 35 || a.atomic_number == 53;
      break;
    case AtomPrimitive::Kind::HCount: r = a.total_h() == p.value; break;
    case AtomPrimitive::Kind::InRing: r = g.atom_in_ring(i); break;
  }
  return r != p.negated;
}

}  // namespace

bool atom_matches(const AtomQuery& q, const MolGraph& g, int atom) {
  for (const auto& ors : q.terms) {
    bool any = false;
    for (const auto& ands : ors) {
      bool all = true;
      for (const auto& p : ands) {
        if (!primitive_matches(p, g, atom)) {
          all = false;
          break;
        }
      }
      if (all) {
        any = true;
        break;
      }
    }
    if (!any) return false;
  }
  return true;
}

bool bond_matches(const BondQuery& q, const MolGraph& g, int bond) {
  const BondOrder order = g.bond(bond).order;
  if (q.all.empty()) return order == BondOrder::Single || order == BondOrder::Aromatic;
  for (const auto& p : q.all) {
    bool r = false;
    switch (p.kind) {
      case BondPrimitive::Kind::Single: r = order == BondOrder::Single; break;
      case BondPrimitive::Kind::Double: r = order == BondOrder::Double; break;
      case BondPrimitive::Kind::Triple: r = order == BondOrder::Triple; break;
      case BondPrimitive::Kind::Aromatic: r = order == BondOrder::Aromatic; break;
      case BondPrimitive::Kind::Any: r = true; break;
      case BondPrimitive::Kind::InRing: r = g.bond_in_ring(bond); break;
    }
    if (r == p.negated) return false;
  }
  return true;
}

namespace {

// Backtracking embedding search. Query atoms are visited in BFS order so each
// one after the first of its component has an already-mapped anchor.
class Matcher {
 public:
  Matcher(const QueryGraph& q, const MolGraph& g, std::size_t limit)
      : q_(q), g_(g), limit_(limit) {
    const auto n = q.atoms().size();
    qadj_.assign(n, {});
    for (std::size_t b = 0; b < q.bonds().size(); ++b) {
      const auto& qb = q.bonds()[b];
      qadj_[static_cast<std::size_t>(qb.a)].push_back({qb.b, static_cast<int>(b)});
      qadj_[static_cast<std::size_t>(qb.b)].push_back({qb.a, static_cast<int>(b)});
    }
    std::vector<bool> seen(n, false);
    for (std::size_t s = 0; s < n; ++s) {
      if (seen[s]) continue;
      std::vector<int> queue{static_cast<int>(s)};
      seen[s] = true;
      for (std::size_t h = 0; h < queue.size(); ++h) {
        const int u = queue[h];
        order_.push_back(u);
        for (const auto& nb : qadj_[static_cast<std::size_t>(u)]) {
          if (!seen[static_cast<std::size_t>(nb.atom)]) {
            seen[static_cast<std::size_t>(nb.atom)] = true;
            queue.push_back(nb.atom);
          }
        }
      }
    }
    map_.assign(n, -1);
    used_.assign(static_cast<std::size_t>(g.atom_count()), false);
  }

  std::size_t run() {
    if (q_.atoms().empty()) return 0;
    extend(0);
    return sets_.size();
  }

 private:
  bool done() const { return sets_.size() >= limit_; }

  void extend(std::size_t depth) {
    if (done()) return;
    if (depth == order_.size()) {
      std::vector<int> set(map_.begin(), map_.end());
      std::sort(set.begin(), set.end());
      sets_.insert(std::move(set));
      return;
    }
    const int qa = order_[depth];
    int anchor = -1;
    for (const auto& nb : qadj_[static_cast<std::size_t>(qa)]) {
      if (map_[static_cast<std::size_t>(nb.atom)] >= 0) {
        anchor = map_[static_cast<std::size_t>(nb.atom)];
        break;
      }
    }
    auto try_atom = [&](int ga) {
      if (used_[static_cast<std::size_t>(ga)]) return;
      if (!atom_matches(q_.atoms()[static_cast<std::size_t>(qa)], g_, ga)) return;
      for (const auto& nb : qadj_[static_cast<std::size_t>(qa)]) {
        const int mapped = map_[static_cast<std::size_t>(nb.atom)];
        if (mapped < 0) continue;
        const int gb = g_.find_bond(ga, mapped);
        if (gb < 0 || !bond_matches(q_.bonds()[static_cast<std::size_t>(nb.bond)].query, g_, gb)) return;
      }
      map_[static_cast<std::size_t>(qa)] = ga;
      used_[static_cast<std::size_t>(ga)] = true;
      extend(depth + 1);
      used_[static_cast<std::size_t>(ga)] = false;
      map_[static_cast<std::size_t>(qa)] = -1;
    };
    if (anchor >= 0) {
      for (const auto& nb : g_.neighbors(anchor)) {
        try_atom(nb.atom);
        if (done()) return;
      }
    } else {
      for (int ga = 0; ga < g_.atom_count(); ++ga) {
        try_atom(ga);
        if (done()) return;
      }
    }
  }

  struct QNeighbor {
    int atom;
    int bond;
  };

  const QueryGraph& q_;
  const MolGraph& g_;
  std::size_t limit_;
  std::vector<std::vector<QNeighbor>> qadj_;
  std::vector<int> order_;
  std::vector<int> map_;
  std::vector<bool> used_;
  std::set<std::vector<int>> sets_;
};

}  // namespace

bool matches(const QueryGraph& query, const MolGraph& g) {
  return Matcher(query, g, 1).run() >= 1;
}

std::size_t count_unique_matches(const QueryGraph& query, const MolGraph& g, std::size_t limit) {
  return Matcher(query, g, limit).run();
}

}  // namespace la3::fingerprint
