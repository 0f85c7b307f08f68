#include <cstdio>
#include <json.hpp>

#include "la3/evalharness.hpp"

namespace la3::eval {
namespace {

using OrderedJson = nlohmann::ordered_json;

std::string format_value(const MetricEntry& m) {
  if (!m.value) return "—";
  const bool two_places = m.name == "Levenshtein" || m.name == "FCD";
  char buf[64];
  std::snprintf(buf, sizeof buf, two_places ? "%.2f" : "%.3f", *m.value);
  return buf;
}

}  // namespace

ReportFormat report_format_from_string(std::string_view s) {
  if (s == "json") return ReportFormat::Json;
  if (s == "tsv") return ReportFormat::Tsv;
  if (s == "markdown" || s == "md") return ReportFormat::Markdown;
  throw EvalError(EvalError::Kind::MalformedReport, "unknown report format '" + std::string(s) + "'");
}

std::string render_report(const MetricReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::Json: {
      OrderedJson j;
      j["task"] = to_string(report.task);
      j["metrics"] = OrderedJson::array();
      for (const auto& m : report.metrics) {
        OrderedJson e;
        e["name"] = m.name;
        e["value"] = m.value ? OrderedJson(*m.value) : OrderedJson(nullptr);
        e["support"] = m.support;
        e["note"] = m.note;
        j["metrics"].push_back(std::move(e));
      }
      j["versions"] = OrderedJson::object();
      for (const auto& [k, v] : report.versions) j["versions"][k] = v;
      j["pairs"] = report.pairs;
      if (report.task == Task::Generation) {
        j["valid"] = report.valid;
        j["fts_excluded"] = report.fts_excluded;
      }
      j["notes"] = report.notes;
      return j.dump(2) + "\n";
    }
    case ReportFormat::Tsv: {
      std::string out = "metric\tvalue\tsupport\n";
      for (const auto& m : report.metrics) {
        out += m.name + '\t' + (m.value ? format_value(m) : std::string{}) + '\t' + std::to_string(m.support) + '\n';
      }
      return out;
    }
    case ReportFormat::Markdown: {
      std::string header = "|";
      std::string rule = "|";
      std::string row = "|";
      std::vector<std::string> footnotes;
      for (const auto& m : report.metrics) {
        header += " " + m.name + " |";
        rule += " --- |";
        row += " " + format_value(m) + " |";
        if (!m.value) footnotes.push_back("— " + m.name + ": " + (m.note.empty() ? "not computed" : m.note));
      }
      std::string out = header + "\n" + rule + "\n" + row + "\n";
      if (!footnotes.empty() || !report.notes.empty()) out += "\n";
      for (const auto& f : footnotes) out += f + "\n";
      for (const auto& n : report.notes) out += n + "\n";
      out += "\n" + std::to_string(report.pairs) + " pairs;";
      for (const auto& [k, v] : report.versions) {
        out += " " + (v.starts_with(k + "=") ? v : k + "=" + v) + ";";
      }
      out.back() = '\n';
      return out;
    }
  }
  return {};
}

MetricReport report_from_json(std::string_view json_text) {
  MetricReport r;
  try {
    const auto j = nlohmann::json::parse(json_text);
    r.task = task_from_string(j.at("task").get<std::string>());
    for (const auto& e : j.at("metrics")) {
      MetricEntry m;
      m.name = e.at("name").get<std::string>();
      if (!e.at("value").is_null()) m.value = e.at("value").get<double>();
      m.support = e.at("support").get<std::size_t>();
      m.note = e.value("note", std::string{});
      r.metrics.push_back(std::move(m));
    }
    r.versions = j.at("versions").get<std::map<std::string, std::string>>();
    r.pairs = j.at("pairs").get<std::size_t>();
    r.valid = j.value("valid", std::size_t{0});
    r.fts_excluded = j.value("fts_excluded", std::size_t{0});
    r.notes = j.value("notes", std::vector<std::string>{});
  } catch (const nlohmann::json::exception& e) {
    throw EvalError(EvalError::Kind::MalformedReport, std::string("malformed report: ") + e.what());
  }
  return r;
}

}  // namespace la3::eval
