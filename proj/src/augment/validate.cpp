#include "la3/augment.hpp"
#include "la3/textmetrics.hpp"

namespace la3::augment {

std::string_view to_string(RejectReason r) noexcept {
  switch (r) {
    case RejectReason::Empty: return "empty";
    case RejectReason::SmilesLeak: return "smiles_leak";
    case RejectReason::Linebreak: return "linebreak";
    case RejectReason::TooShort: return "too_short";
    case RejectReason::TooLong: return "too_long";
  }
  return "unknown";
}

namespace {

bool is_trim_char(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f' || c == '"' || c == '\'' ||
         c == '`';
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_trim_char(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_trim_char(s.back())) s.remove_suffix(1);
  return s;
}

}  // namespace

CaptionVerdict validate_caption(std::string_view rewrite, const dataset::MoleculeRecord& record,
                                const ValidationPolicy& policy) {
  CaptionVerdict v{std::string(trim(rewrite)), std::nullopt};
  const std::string_view text = v.text;
  if (text.empty()) {
    v.reason = RejectReason::Empty;
  } else if (policy.forbid_smiles_substring && !record.smiles.empty() &&
             text.find(record.smiles) != std::string_view::npos) {
    v.reason = RejectReason::SmilesLeak;
  } else if (policy.forbid_linebreaks &&
             (text.find_first_of("\n\r\t") != std::string_view::npos || text.find("\\n") != std::string_view::npos ||
              text.find("\\r") != std::string_view::npos || text.find("\\t") != std::string_view::npos)) {
    v.reason = RejectReason::Linebreak;
  } else {
    const auto n = text::tokenize_words(text).size();
    if (n < policy.min_length) {
      v.reason = RejectReason::TooShort;
    } else if (n > policy.max_length) {
      v.reason = RejectReason::TooLong;
    }
  }
  return v;
}

}  // namespace la3::augment
