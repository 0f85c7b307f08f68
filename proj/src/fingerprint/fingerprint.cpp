#include "la3/fingerprint.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <set>
#include <utility>

#include "la3/hash.hpp"

namespace la3::fingerprint {

using smiles::MolGraph;

std::string_view to_string(Family f) noexcept {
  switch (f) {
    case Family::Morgan: return "morgan";
    case Family::Path: return "path";
    case Family::Keys: return "keys";
  }
  return "unknown";
}

Family family_from_string(std::string_view name) {
  if (name == "morgan") return Family::Morgan;
  if (name == "path") return Family::Path;
  if (name == "keys") return Family::Keys;
  throw FingerprintError("unknown fingerprint family '" + std::string(name) + "'");
}

Fingerprint::Fingerprint(Family family, std::size_t width, std::string params)
    : family_(family), width_(width), params_(std::move(params)), words_((width + 63) / 64, 0) {
  if (width == 0) throw FingerprintError("fingerprint width must be positive");
}

void Fingerprint::set(std::size_t bit) {
  if (bit >= width_) throw FingerprintError("bit " + std::to_string(bit) + " out of range");
  words_[bit / 64] |= std::uint64_t{1} << (bit % 64);
}

bool Fingerprint::test(std::size_t bit) const {
  if (bit >= width_) return false;
  return (words_[bit / 64] >> (bit % 64)) & 1U;
}

std::size_t Fingerprint::popcount() const noexcept {
  std::size_t n = 0;
  for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

std::vector<std::size_t> Fingerprint::on_bits() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < width_; ++i) {
    if (test(i)) out.push_back(i);
  }
  return out;
}

std::string Fingerprint::to_hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  const std::size_t bytes = (width_ + 7) / 8;
  std::string out;
  out.reserve(bytes * 2);
  for (std::size_t j = 0; j < bytes; ++j) {
    const auto byte = static_cast<unsigned>((words_[j / 8] >> ((j % 8) * 8)) & 0xffU);
    out += kDigits[byte >> 4];
    out += kDigits[byte & 0xf];
  }
  return out;
}

double tanimoto(const Fingerprint& a, const Fingerprint& b) {
  if (a.family() != b.family() || a.width() != b.width() || a.params() != b.params()) {
    throw FingerprintError("fingerprint family mismatch: " + std::string(to_string(a.family())) + "(" +
                           a.params() + ") vs " + std::string(to_string(b.family())) + "(" + b.params() + ")");
  }
  std::size_t inter = 0;
  std::size_t uni = 0;
  for (std::size_t i = 0; i < a.words().size(); ++i) {
    inter += static_cast<std::size_t>(std::popcount(a.words()[i] & b.words()[i]));
    uni += static_cast<std::size_t>(std::popcount(a.words()[i] | b.words()[i]));
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

void require_valid(const MolGraph& g) {
  const auto verdict = smiles::check_valence(g);
  if (!verdict.valid) throw FingerprintError("invalid graph: " + verdict.detail);
}

Fingerprint morgan_fp(const MolGraph& g, int radius, std::size_t width) {
  require_valid(g);
  if (radius < 0) throw FingerprintError("radius must be non-negative");
  Fingerprint fp(Family::Morgan, width,
                 "radius=" + std::to_string(radius) + ";width=" + std::to_string(width));
  const int n = g.atom_count();
  std::vector<std::uint64_t> ids(static_cast<std::size_t>(n));
  std::vector<std::vector<int>> env(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto& a = g.atom(i);
    ids[static_cast<std::size_t>(i)] = StableHasher()
                                           .add(0)
                                           .add(a.atomic_number)
                                           .add(g.degree(i))
                                           .add(a.charge)
                                           .add(a.total_h())
                                           .add(g.atom_in_ring(i) ? 1 : 0)
                                           .add(a.isotope.value_or(0))
                                           .digest();
    env[static_cast<std::size_t>(i)] = {i};
  }

  // An environment (atom set) contributes once: the first radius at which it
  // appears, smallest identifier among equal sets at that radius.
  std::set<std::vector<int>> seen;
  auto emit_layer = [&](const std::vector<std::uint64_t>& layer_ids) {
    std::vector<std::pair<std::vector<int>, std::uint64_t>> layer;
    layer.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) layer.emplace_back(env[static_cast<std::size_t>(i)], layer_ids[static_cast<std::size_t>(i)]);
    std::sort(layer.begin(), layer.end());
    for (auto& [atoms, id] : layer) {
      if (seen.insert(atoms).second) fp.set(static_cast<std::size_t>(id % width));
    }
  };
  emit_layer(ids);

  for (int r = 1; r <= radius; ++r) {
    std::vector<std::uint64_t> next(static_cast<std::size_t>(n));
    std::vector<std::vector<int>> next_env(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      std::vector<std::pair<int, std::uint64_t>> nbs;
      std::vector<int> atoms = env[static_cast<std::size_t>(i)];
      for (const auto& nb : g.neighbors(i)) {
        nbs.emplace_back(static_cast<int>(g.bond(nb.bond).order) + 1, ids[static_cast<std::size_t>(nb.atom)]);
        const auto& other = env[static_cast<std::size_t>(nb.atom)];
        atoms.insert(atoms.end(), other.begin(), other.end());
      }
      std::sort(nbs.begin(), nbs.end());
      StableHasher h;
      h.add(r).add(ids[static_cast<std::size_t>(i)]);
      for (const auto& [order, id] : nbs) h.add(order).add(id);
      next[static_cast<std::size_t>(i)] = h.digest();
      std::sort(atoms.begin(), atoms.end());
      atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
      next_env[static_cast<std::size_t>(i)] = std::move(atoms);
    }
    ids = std::move(next);
    env = std::move(next_env);
    emit_layer(ids);
  }
  return fp;
}

Fingerprint path_fp(const MolGraph& g, int max_len, std::size_t width) {
  require_valid(g);
  if (max_len < 1) throw FingerprintError("max path length must be at least 1");
  Fingerprint fp(Family::Path, width,
                 "max_len=" + std::to_string(max_len) + ";width=" + std::to_string(width));
  const int n = g.atom_count();
  auto atom_token = [&](int i) { return g.atom(i).atomic_number * 2 + (g.atom(i).aromatic ? 1 : 0); };

  std::vector<int> atoms;
  std::vector<int> bonds;
  std::vector<bool> on_path(static_cast<std::size_t>(n), false);

  auto emit = [&]() {
    // Token sequence a0 b0 a1 b1 ... ak; each undirected path is hashed in
    // its lexicographically smaller direction.
    std::vector<int> fwd;
    fwd.reserve(atoms.size() * 2);
    for (std::size_t k = 0; k < atoms.size(); ++k) {
      fwd.push_back(atom_token(atoms[k]));
      if (k < bonds.size()) fwd.push_back(static_cast<int>(g.bond(bonds[k]).order) + 1);
    }
    std::vector<int> rev(fwd.rbegin(), fwd.rend());
    if (rev < fwd) return;  // the other end emits it
    StableHasher h;
    h.add(static_cast<int>(bonds.size()));
    for (int t : fwd) h.add(t);
    fp.set(static_cast<std::size_t>(h.digest() % width));
  };

  auto walk = [&](auto&& self, int u) -> void {
    for (const auto& nb : g.neighbors(u)) {
      if (on_path[static_cast<std::size_t>(nb.atom)]) continue;
      atoms.push_back(nb.atom);
      bonds.push_back(nb.bond);
      on_path[static_cast<std::size_t>(nb.atom)] = true;
      emit();
      if (static_cast<int>(bonds.size()) < max_len) self(self, nb.atom);
      on_path[static_cast<std::size_t>(nb.atom)] = false;
      bonds.pop_back();
      atoms.pop_back();
    }
  };
  for (int s = 0; s < n; ++s) {
    atoms = {s};
    bonds.clear();
    on_path[static_cast<std::size_t>(s)] = true;
    walk(walk, s);
    on_path[static_cast<std::size_t>(s)] = false;
  }
  return fp;
}

}  // namespace la3::fingerprint
