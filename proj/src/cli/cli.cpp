#include "la3/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "la3/augment.hpp"
#include "la3/canonical.hpp"
#include "la3/dataset.hpp"
#include "la3/evalharness.hpp"
#include "la3/fingerprint.hpp"
#include "la3/io.hpp"

namespace la3::cli {
namespace {

struct Options {
  std::string corpus;
  std::string split_file;
  std::string pred;
  std::string providers;
  std::string cache_dir = ".la3-cache";
  std::string out;
  std::string format = "markdown";
  std::string family = "morgan";
  std::string augmented;
  std::string report_in;
  std::string fcd_cmd;
  std::string text2mol_cmd;
  std::vector<std::string> inputs;
  std::uint64_t seed = 0;
  std::optional<int> k;
  std::optional<std::size_t> budget;
  bool dry_run = false;
  bool strict_scorers = false;
  bool retry_failed = false;
};

class Emitter {
 public:
  Emitter(std::ostream& out, const std::string& path) : out_(out), path_(path) {}
  void write(const std::string& text) const {
    if (path_.empty()) {
      out_ << text;
      out_.flush();
    } else {
      write_file_atomic(path_, text);
    }
  }

 private:
  std::ostream& out_;
  std::string path_;
};

std::vector<std::string> split_command(const std::string& cmd) {
  std::istringstream in(cmd);
  std::vector<std::string> parts;
  for (std::string p; in >> p;) parts.push_back(p);
  return parts;
}

std::vector<std::string> read_inputs(const Options& o, std::istream& in) {
  if (!o.inputs.empty()) return o.inputs;
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

int cmd_split(const Options& o, std::ostream& out, std::ostream& err) {
  const auto corpus = dataset::load_corpus(o.corpus);
  const auto split = dataset::make_split(corpus, o.seed);
  Emitter(out, o.out).write(dataset::split_to_json(split));
  err << "split " << corpus.size() << " records: " << split.train.size() << " train, " << split.valid.size()
      << " valid, " << split.test.size() << " test\n";
  return kExitOk;
}

int cmd_augment(const Options& o, std::ostream& out, std::ostream& err) {
  auto config = augment::load_augment_config(o.providers);
  augment::AugmentJob job;
  job.corpus = dataset::load_corpus(o.corpus);
  job.split = dataset::load_split(o.split_file);
  job.providers = config.providers;
  int config_rounds = 0;
  for (const auto& p : job.providers) config_rounds += p.rounds;
  job.k = o.k.value_or(config_rounds > 0 ? config_rounds : 2);
  job.prompt_template = augment::template_by_name(config.template_name);
  job.cache_dir = o.cache_dir;
  job.budget = o.budget ? o.budget : config.budget;
  job.validation = config.validation;
  job.dry_run = o.dry_run;
  job.retry_failed = o.retry_failed;

  auto result = augment::run_job(job);
  if (o.dry_run) {
    out << result.report.to_json();
    err << "dry run: " << result.report.planned_requests << " requests would be sent\n";
    return kExitOk;
  }
  if (!o.out.empty()) {
    dataset::save_augmented(result.records, o.out);
    out << result.report.to_json();
  } else {
    out << dataset::format_augmented(result.records);
    err << result.report.to_json();
  }
  return kExitOk;
}

int cmd_validate(const Options& o, std::ostream& out, std::ostream& err) {
  std::size_t problems = 0;
  std::string report = "id\tfield\treason\n";
  std::vector<dataset::MoleculeRecord> corpus;
  if (!o.corpus.empty()) {
    corpus = dataset::load_corpus(o.corpus);
    for (const auto& r : corpus) {
      const auto v = smiles::is_valid(r.smiles);
      if (!v.valid) {
        ++problems;
        report += r.id + "\tsmiles\t" + std::string(smiles::to_string(*v.reason)) + ": " + v.detail + "\n";
      }
      if (r.caption.find(r.smiles) != std::string::npos) {
        ++problems;
        report += r.id + "\tcaption\tsmiles_leak\n";
      }
    }
  }
  if (!o.augmented.empty()) {
    for (const auto& a : dataset::load_augmented(o.augmented)) {
      for (std::size_t j = 0; j < a.rewrites.size(); ++j) {
        const auto v = augment::validate_caption(a.rewrites[j].text, a.base);
        if (!v.accepted()) {
          ++problems;
          report += a.base.id + "\trewrite[" + std::to_string(j) + "]\t" + std::string(augment::to_string(*v.reason)) +
                    "\n";
        }
      }
    }
  }
  if (o.corpus.empty() && o.augmented.empty()) throw CLI::ValidationError("validate needs --corpus or --augmented");
  Emitter(out, o.out).write(report);
  err << problems << " problems found\n";
  return problems == 0 ? kExitOk : kExitData;
}

int cmd_canonicalize(const Options& o, std::istream& in, std::ostream& out, std::ostream& err) {
  std::string text;
  bool any_invalid = false;
  for (const auto& s : read_inputs(o, in)) {
    try {
      text += smiles::canonical_smiles(s) + "\n";
    } catch (const smiles::SmilesError& e) {
      any_invalid = true;
      text += "\n";
      err << s << ": " << e.what() << "\n";
    }
  }
  Emitter(out, o.out).write(text);
  return any_invalid ? kExitData : kExitOk;
}

int cmd_fingerprint(const Options& o, std::istream& in, std::ostream& out, std::ostream& err) {
  const auto family = fingerprint::family_from_string(o.family);
  std::string text;
  bool any_invalid = false;
  for (const auto& s : read_inputs(o, in)) {
    try {
      const auto g = smiles::parse(s);
      const auto fp = family == fingerprint::Family::Morgan ? fingerprint::morgan_fp(g)
                      : family == fingerprint::Family::Path ? fingerprint::path_fp(g)
                                                            : fingerprint::keys_fp(g);
      text += fp.to_hex() + "\n";
    } catch (const DataError& e) {
      any_invalid = true;
      text += "\n";
      err << s << ": " << e.what() << "\n";
    }
  }
  Emitter(out, o.out).write(text);
  return any_invalid ? kExitData : kExitOk;
}

int cmd_eval(eval::Task task, const Options& o, std::ostream& out) {
  const auto format = eval::report_format_from_string(o.format);
  const auto corpus = dataset::load_corpus(o.corpus);
  const auto predictions = eval::load_predictions(o.pred);
  eval::EvalOptions options;
  options.strict_scorers = o.strict_scorers;
  if (!o.fcd_cmd.empty()) options.scorers.push_back({"fcd", split_command(o.fcd_cmd)});
  if (!o.text2mol_cmd.empty()) options.scorers.push_back({"text2mol", split_command(o.text2mol_cmd)});

  eval::MetricReport report;
  if (o.split_file.empty()) {
    report = task == eval::Task::Generation ? eval::eval_generation(predictions, corpus, options)
                                            : eval::eval_captioning(predictions, corpus, options);
  } else {
    report = eval::evaluate(task, predictions, corpus, dataset::load_split(o.split_file), options);
  }
  Emitter(out, o.out).write(eval::render_report(report, format));
  return kExitOk;
}

int cmd_report(const Options& o, std::ostream& out) {
  const auto report = eval::report_from_json(read_file(o.report_in));
  Emitter(out, o.out).write(eval::render_report(report, eval::report_format_from_string(o.format)));
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Molecule caption augmentation and evaluation toolkit", "la3"};
  app.set_config("--config", "", "TOML/INI file with default flag values");
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);
  Options o;

  auto* split = app.add_subcommand("split", "Write a seeded 80/10/10 split of a corpus as JSON");
  split->add_option("--corpus", o.corpus, "Corpus TSV or JSONL")->required();
  split->add_option("--seed", o.seed, "Shuffle seed");
  split->add_option("--out", o.out, "Output path (default stdout)");

  auto* aug = app.add_subcommand("augment", "Rewrite training captions with LLM providers");
  aug->add_option("--corpus", o.corpus, "Corpus TSV or JSONL")->required();
  aug->add_option("--split-file", o.split_file, "Split JSON; only train ids are augmented")->required();
  aug->add_option("--providers", o.providers, "Provider config JSON")->required();
  aug->add_option("--k", o.k, "Rewrites per record")->check(CLI::PositiveNumber);
  aug->add_option("--cache-dir", o.cache_dir, "Response cache directory");
  aug->add_option("--budget", o.budget, "Maximum number of provider requests");
  aug->add_option("--out", o.out, "Augmented JSONL output (default stdout)");
  aug->add_flag("--dry-run", o.dry_run, "Count the requests a real run would send, send none");
  aug->add_flag("--retry-failed", o.retry_failed, "Retry tasks cached as permanent failures");

  auto* val = app.add_subcommand("validate", "Scan a corpus for invalid SMILES and caption leaks");
  val->add_option("--corpus", o.corpus, "Corpus TSV or JSONL");
  val->add_option("--augmented", o.augmented, "Augmented JSONL to check rewrites in");
  val->add_option("--out", o.out, "Problem list output (default stdout)");

  auto* canon = app.add_subcommand("canonicalize", "Print the canonical form of each SMILES given as arguments or stdin lines");
  canon->allow_extras();
  canon->add_option("--out", o.out, "Output path (default stdout)");

  auto* fpc = app.add_subcommand("fingerprint", "Print a hex fingerprint for each SMILES given as arguments or stdin lines");
  fpc->allow_extras();
  fpc->add_option("--family", o.family, "morgan, path or keys")
      ->check(CLI::IsMember({"morgan", "path", "keys"}));
  fpc->add_option("--out", o.out, "Output path (default stdout)");

  std::vector<CLI::App*> evals;
  for (const auto* name : {"eval-gen", "eval-cap"}) {
    auto* ev = app.add_subcommand(name, std::string(name) == "eval-gen" ? "Score generated SMILES"
                                                                         : "Score generated captions");
    ev->add_option("--pred", o.pred, "Prediction TSV (id<TAB>prediction)")->required();
    ev->add_option("--corpus", o.corpus, "Reference corpus")->required();
    ev->add_option("--split-file", o.split_file, "Evaluate against the test ids of this split");
    ev->add_option("--format", o.format, "markdown, json or tsv")
        ->check(CLI::IsMember({"markdown", "md", "json", "tsv"}));
    ev->add_option("--out", o.out, "Report output (default stdout)");
    ev->add_option("--fcd-cmd", o.fcd_cmd, "External FCD scorer command");
    ev->add_option("--text2mol-cmd", o.text2mol_cmd, "External Text2Mol scorer command");
    ev->add_flag("--strict-scorers", o.strict_scorers, "Fail when an external scorer fails");
    evals.push_back(ev);
  }

  auto* rep = app.add_subcommand("report", "Re-render a JSON metric report");
  rep->add_option("--in", o.report_in, "JSON report")->required();
  rep->add_option("--format", o.format, "markdown, json or tsv")
      ->check(CLI::IsMember({"markdown", "md", "json", "tsv"}));
  rep->add_option("--out", o.out, "Output path (default stdout)");

  try {
    app.parse(argc, argv);
    for (auto* sub : {canon, fpc}) {
      if (!sub->parsed()) continue;
      o.inputs = sub->remaining();
      for (const auto& arg : o.inputs) {
        if (arg.starts_with("-")) throw CLI::ExtrasError(sub->get_name(), {arg});
      }
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (split->parsed()) return cmd_split(o, out, err);
    if (aug->parsed()) return cmd_augment(o, out, err);
    if (val->parsed()) return cmd_validate(o, out, err);
    if (canon->parsed()) return cmd_canonicalize(o, in, out, err);
    if (fpc->parsed()) return cmd_fingerprint(o, in, out, err);
    if (evals[0]->parsed()) return cmd_eval(eval::Task::Generation, o, out);
    if (evals[1]->parsed()) return cmd_eval(eval::Task::Captioning, o, out);
    if (rep->parsed()) return cmd_report(o, out);
  } catch (const CLI::ValidationError& e) {
    err << "la3: " << e.what() << "\n" << app.help();
    return kExitUsage;
  } catch (const DataError& e) {
    err << "la3: " << e.what() << "\n";
    return kExitData;
  } catch (const ExternalError& e) {
    err << "la3: " << e.what() << "\n";
    return kExitExternal;
  } catch (const std::exception& e) {
    err << "la3: internal error: " << e.what() << "\n";
    return kExitExternal;
  }
  return kExitUsage;
}

}  // namespace la3::cli
