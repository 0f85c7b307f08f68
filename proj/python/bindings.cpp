#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>
#include <sstream>

#include "la3/augment.hpp"
#include "la3/canonical.hpp"
#include "la3/cli.hpp"
#include "la3/dataset.hpp"
#include "la3/evalharness.hpp"
#include "la3/fingerprint.hpp"
#include "la3/textmetrics.hpp"

namespace py = pybind11;
using namespace la3;

namespace {

fingerprint::Fingerprint fingerprint_of(const std::string& smi, const std::string& family) {
  const auto g = smiles::parse(smi);
  switch (fingerprint::family_from_string(family)) {
    case fingerprint::Family::Morgan:
      return fingerprint::morgan_fp(g);
    case fingerprint::Family::Path:
      return fingerprint::path_fp(g);
    case fingerprint::Family::Keys:
      break;
  }
  return fingerprint::keys_fp(g);
}

text::TokenMode token_mode(const std::string& mode) {
  if (mode == "word") return text::TokenMode::Word;
  if (mode == "char") return text::TokenMode::Char;
  throw DataError("token mode must be word or char, got " + mode);
}

text::RougeVariant rouge_variant(const std::string& v) {
  if (v == "1") return text::RougeVariant::One;
  if (v == "2") return text::RougeVariant::Two;
  if (v == "L" || v == "l") return text::RougeVariant::L;
  throw DataError("ROUGE variant must be 1, 2 or L, got " + v);
}

py::dict record_dict(const dataset::MoleculeRecord& r) {
  py::dict d;
  d["id"] = r.id;
  d["smiles"] = r.smiles;
  d["caption"] = r.caption;
  return d;
}

py::dict augmented_dict(const dataset::AugmentedRecord& a) {
  auto d = record_dict(a.base);
  py::list rewrites;
  for (const auto& w : a.rewrites) {
    py::dict rd;
    rd["text"] = w.text;
    rd["provider"] = w.provider;
    rd["round"] = w.round;
    rd["created_at"] = w.created_at;
    rewrites.append(rd);
  }
  d["rewrites"] = rewrites;
  return d;
}

py::dict split_dict(const dataset::CorpusSplit& s) {
  py::dict d;
  d["train"] = s.train;
  d["valid"] = s.valid;
  d["test"] = s.test;
  return d;
}

}  // namespace

PYBIND11_MODULE(_la3, m) {
  m.doc() = "Molecule caption augmentation and evaluation";

  static py::exception<Error> base_error(m, "Error", PyExc_RuntimeError);
  static py::exception<DataError> data_error(m, "DataError", base_error.ptr());
  static py::exception<ExternalError> external_error(m, "ExternalError", base_error.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const DataError& e) {
      py::set_error(data_error, e.what());
    } catch (const ExternalError& e) {
      py::set_error(external_error, e.what());
    } catch (const Error& e) {
      py::set_error(base_error, e.what());
    }
  });

  m.attr("__version__") = std::string(eval::kToolVersion.substr(4));

  m.def("canonical_smiles", [](const std::string& s) { return smiles::canonical_smiles(s); }, py::arg("smiles"));
  m.def(
      "is_valid",
      [](const std::string& s) -> std::pair<bool, std::optional<std::string>> {
        const auto v = smiles::is_valid(s);
        if (v.valid) return {true, std::nullopt};
        return {false, std::string(smiles::to_string(*v.reason))};
      },
      py::arg("smiles"), "Returns (valid, reason); reason is None for valid input.");

  m.def(
      "fingerprint_bits", [](const std::string& s, const std::string& family) { return fingerprint_of(s, family).on_bits(); },
      py::arg("smiles"), py::arg("family") = "morgan");
  m.def(
      "fingerprint_hex", [](const std::string& s, const std::string& family) { return fingerprint_of(s, family).to_hex(); },
      py::arg("smiles"), py::arg("family") = "morgan");
  m.def(
      "tanimoto",
      [](const std::string& a, const std::string& b, const std::string& family) {
        return fingerprint::tanimoto(fingerprint_of(a, family), fingerprint_of(b, family));
      },
      py::arg("a"), py::arg("b"), py::arg("family") = "morgan");

  m.def(
      "tokenize", [](const std::string& s, const std::string& mode) { return text::tokenize(s, token_mode(mode)).tokens; },
      py::arg("text"), py::arg("mode") = "word");
  m.def(
      "levenshtein", [](const std::string& a, const std::string& b) { return text::levenshtein(a, b); }, py::arg("a"),
      py::arg("b"));
  m.def(
      "corpus_bleu",
      [](const std::vector<std::string>& candidates, const std::vector<std::vector<std::string>>& references,
         const std::string& mode, int max_n, double epsilon) {
        if (candidates.size() != references.size()) throw DataError("candidates and references differ in length");
        const auto tm = token_mode(mode);
        std::vector<text::BleuPair> pairs;
        for (std::size_t i = 0; i < candidates.size(); ++i) {
          text::BleuPair p{text::tokenize(candidates[i], tm), {}};
          for (const auto& r : references[i]) p.references.push_back(text::tokenize(r, tm));
          pairs.push_back(std::move(p));
        }
        return text::corpus_bleu(pairs, {max_n, epsilon});
      },
      py::arg("candidates"), py::arg("references"), py::arg("mode") = "word", py::arg("max_n") = 4,
      py::arg("epsilon") = 0.0);
  m.def(
      "rouge",
      [](const std::string& candidate, const std::string& reference, const std::string& variant) {
        const auto r = text::rouge(text::tokenize_words(candidate), text::tokenize_words(reference),
                                   rouge_variant(variant));
        return std::make_tuple(r.precision, r.recall, r.f1);
      },
      py::arg("candidate"), py::arg("reference"), py::arg("variant") = "L", "Returns (precision, recall, f1).");
  m.def(
      "meteor",
      [](const std::string& candidate, const std::string& reference) {
        return text::meteor(text::tokenize_words(candidate), text::tokenize_words(reference));
      },
      py::arg("candidate"), py::arg("reference"));

  m.def(
      "load_corpus",
      [](const std::filesystem::path& path) {
        py::list out;
        for (const auto& r : dataset::load_corpus(path)) out.append(record_dict(r));
        return out;
      },
      py::arg("path"));
  m.def(
      "make_split", [](const std::vector<std::string>& ids, std::uint64_t seed) { return split_dict(dataset::make_split(ids, seed)); },
      py::arg("ids"), py::arg("seed") = 0);
  m.def(
      "load_augmented",
      [](const std::filesystem::path& path) {
        py::list out;
        for (const auto& a : dataset::load_augmented(path)) out.append(augmented_dict(a));
        return out;
      },
      py::arg("path"));

  m.def(
      "build_prompt",
      [](const std::string& template_name, const std::string& id, const std::string& smi, const std::string& caption) {
        const auto p = augment::build_prompt(augment::template_by_name(template_name), {id, smi, caption});
        return std::make_pair(p.system, p.user);
      },
      py::arg("template"), py::arg("id"), py::arg("smiles"), py::arg("caption"), "Returns (system, user).");
  m.def(
      "validate_caption",
      [](const std::string& rewrite, const std::string& smi) -> std::optional<std::string> {
        const auto v = augment::validate_caption(rewrite, {"", smi, ""});
        if (v.accepted()) return std::nullopt;
        return std::string(augment::to_string(*v.reason));
      },
      py::arg("rewrite"), py::arg("smiles"), "Returns None when accepted, else the rejection reason.");

  m.def(
      "evaluate_json",
      [](const std::string& task, const std::filesystem::path& predictions, const std::filesystem::path& corpus,
         const std::optional<std::filesystem::path>& split_file, bool strict_scorers) {
        eval::EvalOptions options;
        options.strict_scorers = strict_scorers;
        const auto t = eval::task_from_string(task);
        const auto preds = eval::load_predictions(predictions);
        const auto records = dataset::load_corpus(corpus);
        py::gil_scoped_release release;
        const auto report = split_file
                                ? eval::evaluate(t, preds, records, dataset::load_split(*split_file), options)
                                : (t == eval::Task::Generation ? eval::eval_generation(preds, records, options)
                                                               : eval::eval_captioning(preds, records, options));
        return eval::render_report(report, eval::ReportFormat::Json);
      },
      py::arg("task"), py::arg("predictions"), py::arg("corpus"), py::arg("split_file") = std::nullopt,
      py::arg("strict_scorers") = false);
  m.def(
      "render_report",
      [](const std::string& report_json, const std::string& format) {
        return eval::render_report(eval::report_from_json(report_json), eval::report_format_from_string(format));
      },
      py::arg("report_json"), py::arg("format") = "markdown");

  m.def(
      "run_cli",
      [](std::vector<std::string> args, const std::string& stdin_text) {
        args.insert(args.begin(), "la3");
        std::vector<const char*> argv;
        for (const auto& a : args) argv.push_back(a.c_str());
        std::istringstream in(stdin_text);
        std::ostringstream out;
        std::ostringstream err;
        const int code = cli::run(static_cast<int>(argv.size()), argv.data(), in, out, err);
        return std::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), py::arg("stdin") = "", "Runs the la3 command line; returns (exit_code, stdout, stderr).");
}
