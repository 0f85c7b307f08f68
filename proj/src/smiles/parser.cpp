#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "la3/smiles.hpp"

namespace la3::smiles {
namespace {

struct BondSpec {
  BondOrder order = BondOrder::Single;
  BondStereo stereo = BondStereo::None;
  std::size_t position = 0;

  bool same_as(const BondSpec& o) const { return order == o.order && stereo == o.stereo; }
};

struct RingOpening {
  int atom;
  std::optional<BondSpec> bond;
  std::size_t position;
};

bool is_bond_char(char c) {
  return c == '-' || c == '=' || c == '#' || c == '$' || c == ':' || c == '/' || c == '\\';
}

BondSpec bond_from_char(char c, std::size_t pos) {
  switch (c) {
    case '=': return {BondOrder::Double, BondStereo::None, pos};
    case '#': return {BondOrder::Triple, BondStereo::None, pos};
    case '$': return {BondOrder::Quadruple, BondStereo::None, pos};
    case ':': return {BondOrder::Aromatic, BondStereo::None, pos};
    case '/': return {BondOrder::Single, BondStereo::Up, pos};
    case '\\': return {BondOrder::Single, BondStereo::Down, pos};
    default: return {BondOrder::Single, BondStereo::None, pos};
  }
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  MolGraph run() {
    if (text_.empty()) fail(SmilesErrorKind::Grammar, 0, "empty SMILES");
    int prev = -1;
    std::optional<BondSpec> pending;
    struct OpenBranch {
      int atom;
      std::size_t position;
      bool has_atom;
    };
    std::vector<OpenBranch> branches;

    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '[' || c == '*' || std::isalpha(static_cast<unsigned char>(c))) {
        const std::size_t at = pos_;
        const int idx = c == '[' ? parse_bracket_atom() : parse_organic_atom();
        if (prev >= 0) {
          add_bond(prev, idx, pending, at, SmilesErrorKind::Grammar);
        } else if (pending) {
          fail(SmilesErrorKind::Grammar, pending->position, "bond without a preceding atom");
        }
        if (!branches.empty()) branches.back().has_atom = true;
        pending.reset();
        prev = idx;
      } else if (is_bond_char(c)) {
        if (pending) fail(SmilesErrorKind::Grammar, pos_, "two consecutive bond symbols");
        if (prev < 0) fail(SmilesErrorKind::Grammar, pos_, "bond without a preceding atom");
        pending = bond_from_char(c, pos_);
        ++pos_;
      } else if (c == '(') {
        if (prev < 0) fail(SmilesErrorKind::Grammar, pos_, "branch without a preceding atom");
        if (pending) fail(SmilesErrorKind::Grammar, pos_, "bond symbol before '('");
        branches.push_back({prev, pos_, false});
        ++pos_;
      } else if (c == ')') {
        if (branches.empty()) fail(SmilesErrorKind::UnmatchedParen, pos_, "unmatched ')'");
        if (pending) fail(SmilesErrorKind::Grammar, pending->position, "dangling bond");
        if (!branches.back().has_atom) fail(SmilesErrorKind::Grammar, pos_, "empty branch");
        prev = branches.back().atom;
        branches.pop_back();
        ++pos_;
      } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '%') {
        const std::size_t at = pos_;
        const int label = parse_ring_label();
        if (prev < 0) fail(SmilesErrorKind::Grammar, at, "ring closure without a preceding atom");
        ring_closure(prev, label, pending, at);
        pending.reset();
      } else if (c == '.') {
        if (pending) fail(SmilesErrorKind::Grammar, pending->position, "dangling bond");
        if (prev < 0) fail(SmilesErrorKind::Grammar, pos_, "empty component");
        prev = -1;
        ++pos_;
      } else {
        fail(SmilesErrorKind::Grammar, pos_, std::string("unexpected character '") + c + "'");
      }
    }
    if (pending) fail(SmilesErrorKind::Grammar, pending->position, "dangling bond");
    if (prev < 0) fail(SmilesErrorKind::Grammar, pos_, "SMILES ends without an atom");
    if (!branches.empty()) {
      fail(SmilesErrorKind::UnmatchedParen, branches.back().position, "unclosed '('");
    }
    if (!rings_.empty()) {
      const auto& [label, open] = *rings_.begin();
      fail(SmilesErrorKind::UnclosedRing, open.position,
           "unclosed ring bond " + std::to_string(label));
    }
    try {
      return MolGraph(std::move(atoms_), std::move(bonds_));
    } catch (const SmilesError& e) {
      throw SmilesError(SmilesErrorKind::RingClosure, std::string::npos, e.what());
    }
  }

 private:
  [[noreturn]] static void fail(SmilesErrorKind kind, std::size_t pos, const std::string& msg) {
    throw SmilesError(kind, pos, msg);
  }

  int parse_organic_atom() {
    const std::size_t start = pos_;
    Atom atom;
    const char c = text_[pos_];
    if (c == '*') {
      atom.element = "*";
      atom.atomic_number = 0;
      ++pos_;
      return push(std::move(atom));
    }
    const auto next = pos_ + 1 < text_.size() ? text_[pos_ + 1] : '\0';
    if (c == 'C' && next == 'l') {
      atom.element = "Cl";
      pos_ += 2;
    } else if (c == 'B' && next == 'r') {
      atom.element = "Br";
      pos_ += 2;
    } else if (c == 'B' || c == 'C' || c == 'N' || c == 'O' || c == 'P' || c == 'S' || c == 'F' ||
               c == 'I') {
      atom.element = std::string(1, c);
      ++pos_;
    } else if (c == 'b' || c == 'c' || c == 'n' || c == 'o' || c == 'p' || c == 's') {
      atom.element = std::string(1, static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
      atom.aromatic = true;
      ++pos_;
    } else {
      std::size_t end = pos_ + 1;
      if (std::isupper(static_cast<unsigned char>(c)) && end < text_.size() &&
          std::islower(static_cast<unsigned char>(text_[end]))) {
        ++end;
      }
      const std::string token(text_.substr(pos_, end - pos_));
      if (atomic_number(token) > 0) {
        fail(SmilesErrorKind::Grammar, start, "element '" + token + "' must be written in brackets");
      }
      fail(SmilesErrorKind::UnknownElement, start, "unknown element '" + token + "'");
    }
    atom.atomic_number = atomic_number(atom.element);
    return push(std::move(atom));
  }

  int parse_bracket_atom() {
    const std::size_t open = pos_;
    ++pos_;  // '['
    Atom atom;
    atom.bracket = true;

    if (auto iso = read_number()) {
      if (*iso <= 0) fail(SmilesErrorKind::Grammar, open + 1, "isotope must be positive");
      atom.isotope = *iso;
    }

    const std::size_t sym_at = pos_;
    if (pos_ >= text_.size()) fail(SmilesErrorKind::Grammar, pos_, "unterminated bracket atom");
    const char c = text_[pos_];
    if (c == '*') {
      atom.element = "*";
      ++pos_;
    } else if (std::islower(static_cast<unsigned char>(c))) {
      // Aromatic symbols: b c n o p s se as te.
      static const char* const kTwo[] = {"se", "as", "te"};
      bool matched = false;
      for (const char* two : kTwo) {
        if (text_.substr(pos_, 2) == two) {
          atom.element = std::string{static_cast<char>(std::toupper(two[0])), two[1]};
          pos_ += 2;
          matched = true;
          break;
        }
      }
      if (!matched) {
        if (c == 'b' || c == 'c' || c == 'n' || c == 'o' || c == 'p' || c == 's') {
          atom.element = std::string(1, static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
          ++pos_;
        } else {
          fail(SmilesErrorKind::UnknownElement, sym_at,
               "unknown aromatic element '" + std::string(1, c) + "'");
        }
      }
      atom.aromatic = true;
    } else if (std::isupper(static_cast<unsigned char>(c))) {
      std::string two(text_.substr(pos_, 2));
      if (two.size() == 2 && std::islower(static_cast<unsigned char>(two[1])) &&
          atomic_number(two) > 0) {
        atom.element = two;
        pos_ += 2;
      } else if (atomic_number(std::string_view(&text_[pos_], 1)) > 0) {
        atom.element = std::string(1, c);
        ++pos_;
      } else {
        fail(SmilesErrorKind::UnknownElement, sym_at,
             "unknown element '" + (two.size() == 2 && std::islower(static_cast<unsigned char>(two[1]))
                                        ? two
                                        : std::string(1, c)) +
                 "'");
      }
    } else {
      fail(SmilesErrorKind::Grammar, sym_at, "expected element symbol in bracket atom");
    }
    atom.atomic_number = atomic_number(atom.element);

    if (pos_ < text_.size() && text_[pos_] == '@') {
      const std::size_t start = pos_;
      ++pos_;
      if (pos_ < text_.size() && text_[pos_] == '@') {
        ++pos_;
      } else {
        static const char* const kClasses[] = {"TH", "AL", "SP", "TB", "OH"};
        for (const char* cls : kClasses) {
          if (text_.substr(pos_, 2) == cls && pos_ + 2 < text_.size() &&
              std::isdigit(static_cast<unsigned char>(text_[pos_ + 2]))) {
            pos_ += 2;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            break;
          }
        }
      }
      atom.chirality = std::string(text_.substr(start, pos_ - start));
    }

    if (pos_ < text_.size() && text_[pos_] == 'H') {
      ++pos_;
      atom.explicit_h = read_number().value_or(1);
    } else {
      atom.explicit_h = 0;
    }

    if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) {
      const char sign = text_[pos_];
      int magnitude = 1;
      ++pos_;
      if (auto digits = read_number()) {
        magnitude = *digits;
      } else {
        while (pos_ < text_.size() && text_[pos_] == sign) {
          ++magnitude;
          ++pos_;
        }
      }
      if (magnitude > 15) fail(SmilesErrorKind::Grammar, pos_, "charge magnitude out of range");
      atom.charge = sign == '+' ? magnitude : -magnitude;
    }

    if (pos_ < text_.size() && text_[pos_] == ':') {
      ++pos_;
      auto cls = read_number();
      if (!cls) fail(SmilesErrorKind::Grammar, pos_, "atom class requires digits");
      atom.atom_class = *cls;
    }

    if (pos_ >= text_.size() || text_[pos_] != ']') {
      fail(SmilesErrorKind::Grammar, pos_ < text_.size() ? pos_ : open,
           "malformed bracket atom");
    }
    ++pos_;
    return push(std::move(atom));
  }

  std::optional<int> read_number() {
    const std::size_t start = pos_;
    long value = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      value = value * 10 + (text_[pos_] - '0');
      if (value > 1'000'000) fail(SmilesErrorKind::Grammar, start, "number too large");
      ++pos_;
    }
    if (pos_ == start) return std::nullopt;
    return static_cast<int>(value);
  }

  int parse_ring_label() {
    if (text_[pos_] != '%') return text_[pos_++] - '0';
    const std::size_t at = pos_;
    ++pos_;
    if (pos_ + 1 < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])) &&
        std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]))) {
      const int label = (text_[pos_] - '0') * 10 + (text_[pos_ + 1] - '0');
      pos_ += 2;
      return label;
    }
    fail(SmilesErrorKind::Grammar, at, "'%' must be followed by two digits");
  }

  void ring_closure(int atom, int label, const std::optional<BondSpec>& bond, std::size_t at) {
    auto it = rings_.find(label);
    if (it == rings_.end()) {
      rings_.emplace(label, RingOpening{atom, bond, at});
      return;
    }
    const RingOpening open = it->second;
    rings_.erase(it);
    if (open.atom == atom) {
      fail(SmilesErrorKind::RingClosure, at, "ring bond " + std::to_string(label) + " closes on itself");
    }
    std::optional<BondSpec> spec = bond ? bond : open.bond;
    if (bond && open.bond && !bond->same_as(*open.bond)) {
      fail(SmilesErrorKind::RingClosure, at,
           "conflicting bond symbols on ring bond " + std::to_string(label));
    }
    add_bond(open.atom, atom, spec, at, SmilesErrorKind::RingClosure);
  }

  void add_bond(int a, int b, const std::optional<BondSpec>& spec, std::size_t at,
                SmilesErrorKind dup_kind) {
    if (!pairs_.emplace(std::min(a, b), std::max(a, b)).second) {
      fail(dup_kind, at, "duplicate bond between atoms " + std::to_string(a) + " and " +
                             std::to_string(b));
    }
    Bond bond{a, b, BondOrder::Single, BondStereo::None};
    if (spec) {
      bond.order = spec->order;
      bond.stereo = spec->stereo;
    } else if (atoms_[static_cast<std::size_t>(a)].aromatic &&
               atoms_[static_cast<std::size_t>(b)].aromatic) {
      bond.order = BondOrder::Aromatic;
    }
    bonds_.push_back(bond);
  }

  int push(Atom atom) {
    atoms_.push_back(std::move(atom));
    return static_cast<int>(atoms_.size()) - 1;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::vector<Atom> atoms_;
  std::vector<Bond> bonds_;
  std::map<int, RingOpening> rings_;
  std::set<std::pair<int, int>> pairs_;
};

}  // namespace

MolGraph parse(std::string_view smiles) { return Parser(smiles).run(); }

ValidityVerdict is_valid(std::string_view smiles) {
  MolGraph g;
  try {
    g = parse(smiles);
  } catch (const SmilesError& e) {
    const bool ring = e.kind() == SmilesErrorKind::UnclosedRing ||
                      e.kind() == SmilesErrorKind::RingClosure;
    return ValidityVerdict::fail(ring ? InvalidReason::RingClosure : InvalidReason::Grammar,
                                 e.what());
  }
  return check_valence(g);
}

}  // namespace la3::smiles
