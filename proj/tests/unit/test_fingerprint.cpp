#include <doctest.h>

#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "la3/canonical.hpp"
#include "la3/fingerprint.hpp"
#include "la3/io.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace la3;
using namespace la3::fingerprint;

namespace {

Fingerprint from_bits(std::initializer_list<std::size_t> bits, std::size_t width = 16) {
  Fingerprint fp(Family::Morgan, width, "radius=2;width=16");
  for (auto b : bits) fp.set(b);
  return fp;
}

std::size_t key_index(std::string_view description) {
  const auto& keys = StructuralKeyTable::builtin().keys();
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (keys[i].description == description) return i;
  }
  FAIL("no key described as " << description);
  return 0;
}

}  // namespace

TEST_CASE("fingerprint container") {
  auto fp = from_bits({0, 3, 15});
  CHECK(fp.popcount() == 3);
  CHECK(fp.test(3));
  CHECK_FALSE(fp.test(4));
  CHECK(fp.on_bits() == std::vector<std::size_t>{0, 3, 15});
  CHECK(fp.to_hex() == "0980");
  CHECK_THROWS_AS(fp.set(16), FingerprintError);
  CHECK(to_string(Family::Path) == "path");
  CHECK(family_from_string("keys") == Family::Keys);
  CHECK_THROWS_AS(family_from_string("ecfp"), DataError);
}

TEST_CASE("tanimoto examples") {
  CHECK(tanimoto(from_bits({1, 2, 3}), from_bits({2, 3, 4})) == doctest::Approx(0.5));
  CHECK(tanimoto(from_bits({1, 2}), from_bits({1, 2})) == 1.0);
  CHECK(tanimoto(from_bits({1, 2}), from_bits({5, 6})) == 0.0);
  CHECK(tanimoto(from_bits({}), from_bits({})) == 1.0);
  const auto g = smiles::parse("CCO");
  CHECK_THROWS_AS(tanimoto(morgan_fp(g), path_fp(g)), FingerprintError);
  CHECK_THROWS_AS(tanimoto(morgan_fp(g, 2), morgan_fp(g, 3)), FingerprintError);
  CHECK_THROWS_AS(tanimoto(morgan_fp(g, 2, 1024), morgan_fp(g)), FingerprintError);
}

TEST_CASE("tanimoto matches set arithmetic and is monotone in shared bits") {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 2000; ++i) {
    std::set<std::size_t> a;
    std::set<std::size_t> b;
    Fingerprint fa(Family::Path, 64, "p");
    Fingerprint fb(Family::Path, 64, "p");
    for (auto n = rng() % 20; n > 0; --n) {
      const auto bit = rng() % 64;
      a.insert(bit);
      fa.set(bit);
    }
    for (auto n = rng() % 20; n > 0; --n) {
      const auto bit = rng() % 64;
      b.insert(bit);
      fb.set(bit);
    }
    const double t = tanimoto(fa, fb);
    CHECK(t == doctest::Approx(oracle::tanimoto_sets(a, b)).epsilon(1e-15));
    const auto shared = rng() % 64;
    if (!a.count(shared) && !b.count(shared)) {
      fa.set(shared);
      fb.set(shared);
      CHECK(tanimoto(fa, fb) >= t);
    }
  }
}

TEST_CASE("morgan examples") {
  CHECK(morgan_fp(smiles::parse("C")).popcount() == 1);
  // Both ethane carbons share every identifier: one radius-0 bit, one
  // radius-1 bit, and the radius-2 environment repeats the radius-1 atom set.
  CHECK(morgan_fp(smiles::parse("CC")).popcount() == 2);
  const auto fp = morgan_fp(smiles::parse("CCO"));
  CHECK(fp.width() == 2048);
  CHECK(fp.params() == "radius=2;width=2048");
  CHECK(morgan_fp(smiles::parse("CCO"), 0).popcount() == 3);
  CHECK(morgan_fp(smiles::parse("CCO")) == morgan_fp(smiles::parse("OCC")));
  CHECK(morgan_fp(smiles::parse("CCO")) != morgan_fp(smiles::parse("CCN")));
  CHECK_THROWS_AS(morgan_fp(smiles::parse("C(C)(C)(C)(C)C")), FingerprintError);
}

TEST_CASE("path examples") {
  CHECK(path_fp(smiles::parse("C")).popcount() == 0);
  CHECK(path_fp(smiles::parse("CC")).popcount() == 1);
  CHECK(path_fp(smiles::parse("CCC")).popcount() == 2);
  CHECK(path_fp(smiles::parse("CCCC")).popcount() == 3);
  // C-O, C-C, C-C-O: the two one-bond paths differ by element.
  CHECK(path_fp(smiles::parse("CCO")).popcount() == 3);
  CHECK(path_fp(smiles::parse("CCO")).params() == "max_len=7;width=2048");
  CHECK(path_fp(smiles::parse("CCCCCCCCCC"), 7).popcount() == 7);
  CHECK(path_fp(smiles::parse("CCCCCCCCCC"), 3).popcount() == 3);
}

TEST_CASE("key table shape") {
  const auto& table = StructuralKeyTable::builtin();
  CHECK(table.version() == "la3-keys-v1");
  CHECK(table.keys().size() == kKeyCount);
  const auto fp = keys_fp(smiles::parse("CCO"));
  CHECK(fp.width() == 166);
  CHECK(fp.params() == "table=la3-keys-v1");
  CHECK_THROWS_AS(StructuralKeyTable("short", {}), DataError);
  CHECK_THROWS_AS(StructuralKeyTable::from_json(R"({"version": "v", "keys": []})"), DataError);
}

TEST_CASE("key examples") {
  const auto six_ring = key_index("six-membered ring");
  CHECK(keys_fp(smiles::parse("c1ccccc1")).test(six_ring));
  CHECK_FALSE(keys_fp(smiles::parse("CCCCCC")).test(six_ring));
  const auto nitrogen = key_index("nitrogen");
  CHECK_FALSE(keys_fp(smiles::parse("C")).test(nitrogen));
  CHECK(keys_fp(smiles::parse("CN")).test(nitrogen));
  const auto frag = key_index("two or more fragments");
  CHECK(keys_fp(smiles::parse("[Na+].[Cl-]")).test(frag));
  CHECK_FALSE(keys_fp(smiles::parse("CCO")).test(frag));
  const auto charge = key_index("formal charge");
  CHECK(keys_fp(smiles::parse("C[N+](C)(C)C")).test(charge));
  CHECK_FALSE(keys_fp(smiles::parse("CN(C)C")).test(charge));
  const auto three_ring = key_index("three-membered ring");
  CHECK(keys_fp(smiles::parse("C1CC1")).test(three_ring));
  CHECK_FALSE(keys_fp(smiles::parse("C1CCC1")).test(three_ring));
}

TEST_CASE("a pattern key matches the graph it was written from") {
  for (const auto& r : la3::testing::fixture_corpus()) {
    if (r.smiles.find_first_of("[@/\\") != std::string::npos) continue;
    const auto g = smiles::parse(r.smiles);
    const StructuralKey key{"self", PatternKey{QueryGraph::parse(r.smiles), 1}};
    CHECK_MESSAGE(key_matches(key, g), r.smiles);
  }
}

TEST_CASE("pattern matches survive disjoint union") {
  const auto& fx = la3::testing::fixture_corpus();
  std::mt19937_64 rng(2);
  for (int i = 0; i < 200; ++i) {
    const auto& a = fx[rng() % fx.size()];
    const auto& b = fx[rng() % fx.size()];
    const auto ga = smiles::parse(a.smiles);
    const auto gab = smiles::parse(a.smiles + "." + b.smiles);
    for (const auto& key : StructuralKeyTable::builtin().keys()) {
      if (!std::holds_alternative<PatternKey>(key.predicate)) continue;
      if (key_matches(key, ga)) CHECK_MESSAGE(key_matches(key, gab), key.description);
    }
  }
}

TEST_CASE("fingerprints are invariant under atom reordering") {
  std::mt19937_64 rng(17);
  for (const auto& r : la3::testing::fixture_corpus()) {
    const auto g = smiles::parse(r.smiles);
    const auto m = morgan_fp(g);
    const auto p = path_fp(g);
    const auto k = keys_fp(g);
    for (int i = 0; i < 3; ++i) {
      const auto h = smiles::parse(la3::testing::random_smiles(g, rng));
      CHECK_MESSAGE(morgan_fp(h) == m, r.smiles);
      CHECK_MESSAGE(path_fp(h) == p, r.smiles);
      CHECK_MESSAGE(keys_fp(h) == k, r.smiles);
    }
  }
}

TEST_CASE("golden fingerprints are bit-identical") {
  std::istringstream in(read_file(la3::testing::data_path("fingerprints_golden.tsv")));
  std::string line;
  std::getline(in, line);
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    const auto t1 = line.find('\t');
    const auto t2 = line.find('\t', t1 + 1);
    const auto smi = line.substr(0, t1);
    const auto family = family_from_string(line.substr(t1 + 1, t2 - t1 - 1));
    const auto g = smiles::parse(smi);
    const auto fp = family == Family::Morgan ? morgan_fp(g) : family == Family::Path ? path_fp(g) : keys_fp(g);
    CHECK_MESSAGE(fp.to_hex() == line.substr(t2 + 1), smi << " " << to_string(family));
    ++rows;
  }
  CHECK(rows == 60);
}
