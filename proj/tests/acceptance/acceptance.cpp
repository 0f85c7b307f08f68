// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <json.hpp>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "la3/augment.hpp"
#include "la3/canonical.hpp"
#include "la3/cli.hpp"
#include "la3/evalharness.hpp"
#include "la3/fingerprint.hpp"
#include "la3/io.hpp"
#include "la3/textmetrics.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace la3;
using dataset::MoleculeRecord;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void criterion(const std::string& name, const std::function<Outcome()>& check) {
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::cout << (o.pass ? "PASS " : "FAIL ") << name;
  if (!o.detail.empty()) std::cout << " (" << o.detail << ")";
  std::cout << std::endl;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, int decimals = 3) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(decimals) << v;
  return s.str();
}

std::vector<eval::Prediction> truth(const std::vector<MoleculeRecord>& refs, eval::Task task) {
  std::vector<eval::Prediction> out;
  for (const auto& r : refs) out.push_back({r.id, task == eval::Task::Generation ? r.smiles : r.caption});
  return out;
}

double value(const eval::MetricReport& r, std::string_view name) {
  const auto* m = r.find(name);
  if (m == nullptr || !m->value) throw std::runtime_error("metric " + std::string(name) + " missing");
  return *m->value;
}

Outcome generation_ground_truth(std::size_t n, double limit_seconds) {
  const auto refs = la3::testing::synthetic_corpus(n, 2024 + n);
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = eval::eval_generation(truth(refs, eval::Task::Generation), refs);
  const double elapsed = seconds_since(t0);
  std::string detail;
  bool ok = true;
  for (const auto* name : {"BLEU", "Exact", "MACCS FTS", "RDK FTS", "Morgan FTS", "Validity"}) {
    const double v = value(r, name);
    detail += std::string(name) + "=" + fmt(v) + " ";
    ok = ok && v == 1.0;
  }
  const double lev = value(r, "Levenshtein");
  detail += "Levenshtein=" + fmt(lev, 1) + " ";
  ok = ok && lev == 0.0;
  const auto md = eval::render_report(r, eval::ReportFormat::Markdown);
  ok = ok && md.find("| 1.000 | 1.000 | 0.00 | 1.000 | 1.000 | 1.000 | — | — | 1.000 |") != std::string::npos;
  ok = ok && r.pairs == n && elapsed < limit_seconds;
  detail += "n=" + std::to_string(r.pairs) + " time=" + fmt(elapsed, 2) + "s limit=" + fmt(limit_seconds, 0) + "s";
  return {ok, detail};
}

std::filesystem::path temp_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("la3_acceptance_" + name);
  fs::remove_all(dir);
  return dir;
}

augment::ProviderConfig provider(const std::string& name, int rounds) {
  augment::ProviderConfig p;
  p.name = name;
  p.endpoint = "http://mock.invalid/v1/chat/completions";
  p.model = name + "-model";
  p.rounds = rounds;
  p.requests_per_minute = 0;
  return p;
}

augment::AugmentJob pipeline_job(std::size_t n, const fs::path& cache, std::vector<augment::ProviderConfig> providers) {
  augment::AugmentJob job;
  const auto& fx = la3::testing::fixture_corpus();
  job.corpus.assign(fx.begin(), fx.begin() + static_cast<std::ptrdiff_t>(n));
  for (const auto& r : job.corpus) job.split.train.push_back(r.id);
  job.providers = std::move(providers);
  job.k = 0;
  for (const auto& p : job.providers) job.k += p.rounds;
  job.cache_dir = cache;
  return job;
}

struct Fleet {
  explicit Fleet(augment::Clock& clock) : clock(clock) {}
  augment::MockProvider& add(const std::string& name) {
    mocks[name] = std::make_shared<augment::MockProvider>(clock);
    return *mocks[name];
  }
  augment::MockProvider& add(const std::string& name, augment::MockStep fallback) {
    mocks[name] = std::make_shared<augment::MockProvider>(clock, std::vector<augment::MockStep>{}, std::move(fallback));
    return *mocks[name];
  }
  augment::TransportFactory factory() {
    return [this](const augment::ProviderConfig& p) -> std::shared_ptr<augment::Transport> { return mocks.at(p.name); };
  }
  std::size_t total() const {
    std::size_t n = 0;
    for (const auto& [_, m] : mocks) n += m->request_count();
    return n;
  }
  augment::Clock& clock;
  std::map<std::string, std::shared_ptr<augment::MockProvider>> mocks;
};

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli_run(std::vector<std::string> args) {
  args.insert(args.begin(), "la3");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::istringstream in;
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), in, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

int main() {
  criterion("generation ground truth, 3301 records: perfect scores in under 300 s",
            [] { return generation_ground_truth(3301, 300.0); });
  criterion("generation ground truth, 100 records: perfect scores in under 10 s",
            [] { return generation_ground_truth(100, 10.0); });

  criterion("captioning ground truth: BLEU and ROUGE 1.000, METEOR >= 0.999", [] {
    const auto refs = la3::testing::synthetic_corpus(3301, 77);
    const auto r = eval::eval_captioning(truth(refs, eval::Task::Captioning), refs);
    bool ok = true;
    std::string detail;
    for (const auto* name : {"BLEU-2", "BLEU-4", "ROUGE-1", "ROUGE-2", "ROUGE-L"}) {
      const double v = value(r, name);
      detail += std::string(name) + "=" + fmt(v) + " ";
      ok = ok && v == 1.0;
    }
    const double meteor = value(r, "METEOR");
    detail += "METEOR=" + fmt(meteor, 4);
    return Outcome{ok && meteor >= 0.999, detail};
  });

  criterion("canonicalization: 100 molecules x 1000 atom orders give one string each", [] {
    const auto& fx = la3::testing::fixture_corpus();
    std::mt19937_64 rng(31);
    std::size_t broken = 0;
    std::string first_broken;
    for (std::size_t m = 0; m < 100; ++m) {
      const auto g = smiles::parse(fx[m].smiles);
      const auto expected = smiles::canonicalize(g);
      for (int t = 0; t < 1000; ++t) {
        const auto perm = la3::testing::random_permutation(g.atom_count(), rng);
        // Alternate between the permuted graph and a reparse of the SMILES
        // written from that order.
        const auto got = t % 2 == 0 ? smiles::canonicalize(smiles::permute(g, perm))
                                    : smiles::canonical_smiles(smiles::write_smiles(g, perm));
        if (got != expected) {
          if (broken++ == 0) first_broken = fx[m].smiles;
        }
      }
    }
    return Outcome{broken == 0, broken == 0 ? "100000 checks" : std::to_string(broken) + " mismatches, e.g. " +
                                                                    first_broken};
  });

  criterion("levenshtein equals the recursive definition on all string pairs up to length 8 over {a,b,c}", [] {
    const auto t0 = std::chrono::steady_clock::now();
    const oracle::StringUniverse u("abc", 8);
    const auto table = oracle::levenshtein_all_pairs(u);
    const std::size_t n = u.strings.size();
    // Spot-check the memoized table against the unmemoized recursion.
    std::mt19937_64 rng(5);
    for (int i = 0; i < 200; ++i) {
      const auto a = rng() % n;
      const auto b = rng() % n;
      if (u.strings[a].size() + u.strings[b].size() > 12) continue;
      if (table[a * n + b] != oracle::levenshtein_recursive(u.strings[a], u.strings[b])) {
        return Outcome{false, "oracle table disagrees with recursion"};
      }
    }
    std::size_t mismatches = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (text::levenshtein(u.strings[i], u.strings[j]) != table[i * n + j]) ++mismatches;
      }
    }
    const double elapsed = seconds_since(t0);
    return Outcome{mismatches == 0 && elapsed < 60.0, std::to_string(n * n) + " pairs, " +
                                                          std::to_string(mismatches) + " mismatches, time=" +
                                                          fmt(elapsed, 2) + "s"};
  });

  criterion("BLEU hand case equals sqrt(1/2)", [] {
    const std::vector<text::BleuPair> pairs{
        {{{"a", "b", "c", "d"}, text::TokenMode::Word}, {{{"a", "b", "c", "e"}, text::TokenMode::Word}}}};
    const double got = text::corpus_bleu(pairs, {2, 0.0});
    return Outcome{std::abs(got - std::sqrt(0.5)) <= 1e-9, "got " + fmt(got, 12)};
  });

  criterion("ROUGE-L equals brute-force LCS on 1000 random cases", [] {
    std::mt19937_64 rng(12345);
    std::size_t bad = 0;
    for (int i = 0; i < 1000; ++i) {
      auto gen = [&] {
        std::vector<std::string> t(1 + rng() % 12);
        for (auto& s : t) s = std::string(1, static_cast<char>('a' + rng() % 4));
        return t;
      };
      const auto a = gen();
      const auto b = gen();
      const double lcs = static_cast<double>(oracle::lcs_brute_force(a, b));
      const auto r = text::rouge({a, text::TokenMode::Word}, {b, text::TokenMode::Word}, text::RougeVariant::L);
      const double p = lcs / a.size();
      const double rc = lcs / b.size();
      const double f = lcs == 0 ? 0.0 : 2 * p * rc / (p + rc);
      if (std::abs(r.precision - p) > 1e-12 || std::abs(r.recall - rc) > 1e-12 || std::abs(r.f1 - f) > 1e-12) ++bad;
    }
    return Outcome{bad == 0, std::to_string(bad) + " mismatches"};
  });

  criterion("fingerprints are invariant under atom reordering, 500 cases per family", [] {
    const auto& fx = la3::testing::fixture_corpus();
    std::mt19937_64 rng(99);
    std::map<std::string, std::size_t> bad;
    for (int i = 0; i < 500; ++i) {
      const auto g = smiles::parse(fx[rng() % fx.size()].smiles);
      const auto h = smiles::parse(la3::testing::random_smiles(g, rng));
      if (fingerprint::morgan_fp(g) != fingerprint::morgan_fp(h)) ++bad["morgan"];
      if (fingerprint::path_fp(g) != fingerprint::path_fp(h)) ++bad["path"];
      if (fingerprint::keys_fp(g) != fingerprint::keys_fp(h)) ++bad["keys"];
    }
    return Outcome{bad.empty(), bad.empty() ? "1500 checks" : std::to_string(bad.size()) + " families differ"};
  });

  criterion("tanimoto identity, symmetry and range on 10000 cases", [] {
    const auto& fx = la3::testing::fixture_corpus();
    std::vector<std::vector<fingerprint::Fingerprint>> fps(3);
    for (const auto& r : fx) {
      const auto g = smiles::parse(r.smiles);
      fps[0].push_back(fingerprint::morgan_fp(g));
      fps[1].push_back(fingerprint::path_fp(g));
      fps[2].push_back(fingerprint::keys_fp(g));
    }
    std::mt19937_64 rng(7);
    std::size_t bad = 0;
    for (int i = 0; i < 10000; ++i) {
      const auto& fam = fps[static_cast<std::size_t>(i % 3)];
      const auto& a = fam[rng() % fam.size()];
      const auto& b = fam[rng() % fam.size()];
      const double ab = fingerprint::tanimoto(a, b);
      if (fingerprint::tanimoto(a, a) != 1.0 || ab != fingerprint::tanimoto(b, a) || ab < 0.0 || ab > 1.0) ++bad;
    }
    return Outcome{bad == 0, std::to_string(bad) + " violations"};
  });

  criterion("fingerprint golden file: 20 molecules bit-identical", [] {
    std::istringstream in(read_file(la3::testing::data_path("fingerprints_golden.tsv")));
    std::string line;
    std::getline(in, line);
    std::set<std::string> molecules;
    std::size_t rows = 0;
    std::size_t bad = 0;
    while (std::getline(in, line)) {
      const auto t1 = line.find('\t');
      const auto t2 = line.find('\t', t1 + 1);
      const auto smi = line.substr(0, t1);
      const auto family = fingerprint::family_from_string(line.substr(t1 + 1, t2 - t1 - 1));
      const auto g = smiles::parse(smi);
      const auto fp = family == fingerprint::Family::Morgan ? fingerprint::morgan_fp(g)
                      : family == fingerprint::Family::Path ? fingerprint::path_fp(g)
                                                            : fingerprint::keys_fp(g);
      if (fp.to_hex() != line.substr(t2 + 1)) ++bad;
      molecules.insert(smi);
      ++rows;
    }
    return Outcome{bad == 0 && molecules.size() == 20 && rows == 60,
                   std::to_string(molecules.size()) + " molecules, " + std::to_string(rows) + " rows, " +
                       std::to_string(bad) + " mismatches"};
  });

  criterion("pipeline: cold k=2 run over 50 records sends 100 requests; rerun sends 0", [] {
    const auto cache = temp_dir("cold");
    const auto job = pipeline_job(50, cache, {provider("A", 1), provider("B", 1)});
    augment::SimulatedClock clock;
    Fleet cold(clock);
    cold.add("A");
    cold.add("B");
    const auto first = augment::run_job(job, clock, cold.factory());
    Fleet warm(clock);
    warm.add("A");
    warm.add("B");
    const auto second = augment::run_job(job, clock, warm.factory());
    const bool same = dataset::format_augmented(first.records) == dataset::format_augmented(second.records);
    return Outcome{cold.total() == 100 && warm.total() == 0 && same,
                   "cold=" + std::to_string(cold.total()) + " rerun=" + std::to_string(warm.total())};
  });

  criterion("pipeline: a SMILES-leaking provider is retried exactly max_retries times", [] {
    auto job = pipeline_job(1, {}, {provider("A", 1)});
    job.providers[0].max_retries = 3;
    augment::SimulatedClock clock;
    Fleet fleet(clock);
    fleet.add("A", augment::MockStep::ok("This molecule is written {SMILES} and is quite interesting."));
    const auto r = augment::run_job(job, clock, fleet.factory());
    const bool ok = r.report.retries == 3 && fleet.total() == 4 && r.report.failed == 1 &&
                    r.report.failures.at(0).reason == "smiles_leak";
    return Outcome{ok, "retries=" + std::to_string(r.report.retries) + " requests=" + std::to_string(fleet.total())};
  });

  criterion("pipeline: at most R requests in any simulated minute", [] {
    constexpr int kRate = 5;
    auto job = pipeline_job(50, {}, {provider("A", 1), provider("B", 1)});
    for (auto& p : job.providers) {
      p.requests_per_minute = kRate;
      p.max_concurrency = 4;
    }
    augment::SimulatedClock clock;
    Fleet fleet(clock);
    fleet.add("A");
    fleet.add("B");
    (void)augment::run_job(job, clock, fleet.factory());
    std::size_t worst = 0;
    for (const auto& [name, mock] : fleet.mocks) {
      std::vector<augment::TimePoint> times;
      for (const auto& r : mock->requests()) times.push_back(r.at);
      std::sort(times.begin(), times.end());
      for (std::size_t i = 0; i < times.size(); ++i) {
        const auto end = std::lower_bound(times.begin(), times.end(), times[i] + augment::Duration{60000});
        worst = std::max(worst, static_cast<std::size_t>(end - (times.begin() + static_cast<std::ptrdiff_t>(i))));
      }
    }
    return Outcome{worst <= kRate && fleet.total() == 100,
                   "max per window=" + std::to_string(worst) + " R=" + std::to_string(kRate)};
  });

  criterion("cli: canonicalize OCC and CCO print identical lines", [] {
    const auto r = cli_run({"canonicalize", "OCC", "CCO"});
    const auto nl = r.out.find('\n');
    const auto a = r.out.substr(0, nl);
    const auto b = r.out.substr(nl + 1, r.out.size() - nl - 2);
    return Outcome{r.code == 0 && a == b && !a.empty(), a + " / " + b};
  });

  criterion("cli: unknown flag exits 1 with usage on stderr", [] {
    const auto r = cli_run({"eval-gen", "--no-such-flag"});
    return Outcome{r.code == 1 && r.err.find("Usage") != std::string::npos, "exit " + std::to_string(r.code)};
  });

  criterion("cli: augment --dry-run sends nothing and prints the request count", [] {
    const auto dir = temp_dir("dry");
    fs::create_directories(dir);
    const auto corpus = la3::testing::data_path("molecules.tsv");
    const auto split_path = (dir / "split.json").string();
    if (cli_run({"split", "--corpus", corpus, "--out", split_path}).code != 0) return Outcome{false, "split failed"};
    write_file_atomic(dir / "providers.json", R"({"providers": [
      {"name": "a", "endpoint": "http://127.0.0.1:9/v1/chat/completions", "model": "m1"},
      {"name": "b", "endpoint": "http://127.0.0.1:9/v1/chat/completions", "model": "m2"}]})");
    const auto r = cli_run({"augment", "--corpus", corpus, "--split-file", split_path, "--providers",
                            (dir / "providers.json").string(), "--k", "2", "--cache-dir", (dir / "cache").string(),
                            "--dry-run"});
    const auto expected = 2 * dataset::load_split(split_path).train.size();
    const auto planned = nlohmann::json::parse(r.out).at("planned_requests").get<std::size_t>();
    return Outcome{r.code == 0 && planned == expected && !fs::exists(dir / "cache") &&
                       r.err.find(std::to_string(expected) + " requests") != std::string::npos,
                   std::to_string(planned) + " planned"};
  });

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
