// Valence table, version "valence-v1".
//
// Neutral entries follow the usual organic-subset defaults. Charged atoms are
// looked up through the isoelectronic element in the same period
// (N+ behaves like C, O- like F, S+ like P); a charged atom that becomes
// isoelectronic with the period's noble gas must carry no bonds or hydrogens.
// Elements outside the table (metals, noble gases, most of the d/f block) are
// accepted with any valence.

#include <algorithm>
#include <array>
#include <span>

#include "la3/smiles.hpp"

namespace la3::smiles {
namespace {

struct Entry {
  int z;
  std::array<int, 3> valences;
  int count;
};

constexpr std::array<Entry, 16> kTable = {{
    {1, {1, 0, 0}, 1},    // H
    {5, {3, 0, 0}, 1},    // B
    {6, {4, 0, 0}, 1},    // C
    {7, {3, 5, 0}, 2},    // N
    {8, {2, 0, 0}, 1},    // O
    {9, {1, 0, 0}, 1},    // F
    {14, {4, 0, 0}, 1},   // Si
    {15, {3, 5, 0}, 2},   // P
    {16, {2, 4, 6}, 3},   // S
    {17, {1, 0, 0}, 1},   // Cl
    {32, {4, 0, 0}, 1},   // Ge
    {33, {3, 5, 0}, 2},   // As
    {34, {2, 4, 6}, 3},   // Se
    {35, {1, 0, 0}, 1},   // Br
    {52, {2, 4, 6}, 3},   // Te
    {53, {1, 0, 0}, 1},   // I
}};

constexpr std::array<int, 1> kZero = {0};

const Entry* find(int z) {
  for (const auto& e : kTable) {
    if (e.z == z) return &e;
  }
  return nullptr;
}

int period_of(int z) {
  if (z <= 2) return 1;
  if (z <= 10) return 2;
  if (z <= 18) return 3;
  if (z <= 36) return 4;
  if (z <= 54) return 5;
  if (z <= 86) return 6;
  return 7;
}

bool is_noble_gas(int z) {
  return z == 2 || z == 10 || z == 18 || z == 36 || z == 54 || z == 86;
}

}  // namespace

std::span<const int> allowed_valences(int z, int charge) {
  const Entry* own = find(z);
  if (own == nullptr) return {};
  if (z == 1 && charge != 0) return kZero;  // bare proton or hydride
  if (charge == 0) {
    return {own->valences.data(), static_cast<std::size_t>(own->count)};
  }
  const int shifted = z - charge;
  if (shifted <= 0 || period_of(shifted) != period_of(z)) return {};
  if (is_noble_gas(shifted)) return kZero;
  if (const Entry* e = find(shifted)) {
    return {e->valences.data(), static_cast<std::size_t>(e->count)};
  }
  return {};
}

int default_implicit_h(int z, bool aromatic, int bond_order_sum) {
  const auto allowed = allowed_valences(z, 0);
  if (allowed.empty()) return 0;
  if (aromatic) {
    // One valence unit is taken by the delocalized pi system.
    return std::max(0, allowed.front() - bond_order_sum - 1);
  }
  for (int v : allowed) {
    if (v >= bond_order_sum) return v - bond_order_sum;
  }
  return 0;
}

std::string_view to_string(InvalidReason reason) noexcept {
  switch (reason) {
    case InvalidReason::Grammar: return "grammar";
    case InvalidReason::RingClosure: return "ring_closure";
    case InvalidReason::Valence: return "valence";
  }
  return "unknown";
}

ValidityVerdict check_valence(const MolGraph& g) {
  for (int i = 0; i < g.atom_count(); ++i) {
    const Atom& a = g.atom(i);
    if (a.aromatic && !g.atom_in_ring(i)) {
      return ValidityVerdict::fail(InvalidReason::Valence,
                                   "aromatic atom " + std::to_string(i) + " outside a ring");
    }
    const auto allowed = allowed_valences(a.atomic_number, a.charge);
    if (allowed.empty()) continue;
    const int total = g.bond_order_sum(i) + a.total_h();
    const int max_allowed = *std::max_element(allowed.begin(), allowed.end());
    const auto in_table = [&](int v) {
      return std::find(allowed.begin(), allowed.end(), v) != allowed.end();
    };
    bool ok;
    if (a.bracket) {
      // Bracket atoms state their hydrogens; an under-saturated atom is a radical.
      ok = total <= max_allowed;
    } else if (a.aromatic || g.has_aromatic_bond(i)) {
      ok = in_table(total) || in_table(total + 1);
    } else {
      ok = in_table(total);
    }
    if (!ok) {
      return ValidityVerdict::fail(
          InvalidReason::Valence,
          "atom " + std::to_string(i) + " (" + a.element + ") has valence " + std::to_string(total));
    }
  }
  for (int b = 0; b < g.bond_count(); ++b) {
    if (g.bond(b).order == BondOrder::Aromatic && !g.bond_in_ring(b)) {
      return ValidityVerdict::fail(InvalidReason::Valence,
                                   "aromatic bond " + std::to_string(b) + " outside a ring");
    }
  }
  return ValidityVerdict::ok();
}

}  // namespace la3::smiles
