#include <cctype>

#include "la3/textmetrics.hpp"
#include "utf8.hpp"

namespace la3::text {

std::string_view to_string(TokenMode m) noexcept { return m == TokenMode::Char ? "char" : "word"; }

std::u32string decode_utf8(std::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  for (std::size_t pos = 0; pos < text.size();) {
    const auto s = detail::decode_at(text, pos);
    out.push_back(s.valid ? s.code : U'�');
    pos += s.length;
  }
  return out;
}

TokenSeq tokenize_chars(std::string_view text) {
  TokenSeq seq{{}, TokenMode::Char};
  seq.tokens.reserve(text.size());
  for (std::size_t pos = 0; pos < text.size();) {
    const auto s = detail::decode_at(text, pos);
    seq.tokens.emplace_back(text.substr(pos, s.length));
    pos += s.length;
  }
  return seq;
}

TokenSeq tokenize_words(std::string_view text) {
  TokenSeq seq{{}, TokenMode::Word};
  std::string current;
  auto flush = [&] {
    if (!current.empty()) seq.tokens.push_back(std::move(current));
    current.clear();
  };
  for (std::size_t pos = 0; pos < text.size();) {
    const auto s = detail::decode_at(text, pos);
    if (s.valid && detail::is_space(s.code)) {
      flush();
    } else if (s.valid && s.code < 0x80 && std::ispunct(static_cast<int>(s.code))) {
      flush();
      seq.tokens.emplace_back(1, static_cast<char>(s.code));
    } else if (s.valid && s.code < 0x80) {
      current += static_cast<char>(std::tolower(static_cast<int>(s.code)));
    } else {
      current.append(text.substr(pos, s.length));
    }
    pos += s.length;
  }
  flush();
  return seq;
}

TokenSeq tokenize(std::string_view text, TokenMode mode) {
  return mode == TokenMode::Char ? tokenize_chars(text) : tokenize_words(text);
}

}  // namespace la3::text
