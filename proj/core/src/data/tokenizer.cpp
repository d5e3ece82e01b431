#include "wikireading/data/tokenizer.hpp"

#include <string_view>

namespace wikireading::data {

namespace {

bool is_space(unsigned char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

bool is_punct(unsigned char c) {
  return (c >= 0x21 && c <= 0x2f) || (c >= 0x3a && c <= 0x40) || (c >= 0x5b && c <= 0x60) || (c >= 0x7b && c <= 0x7e);
}

bool attaches_left(std::string_view t) {
  return t == "," || t == "." || t == ";" || t == ":" || t == "!" || t == "?" || t == ")" || t == "]" || t == "}" ||
         t == "%" || t == "-" || t == "/" || t == "'";
}

bool attaches_right(std::string_view t) {
  return t == "(" || t == "[" || t == "{" || t == "$" || t == "-" || t == "/" || t == "'";
}

}  // namespace

std::vector<Token> tokenize_with_offsets(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (is_space(c)) {
      ++i;
    } else if (is_punct(c)) {
      tokens.push_back({std::string(1, text[i]), i, i + 1});
      ++i;
    } else {
      const std::size_t start = i;
      while (i < text.size()) {
        const auto d = static_cast<unsigned char>(text[i]);
        if (is_space(d) || is_punct(d)) break;
        ++i;
      }
      tokens.push_back({std::string(text.substr(start, i - start)), start, i});
    }
  }
  return tokens;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  for (auto& t : tokenize_with_offsets(text)) out.push_back(std::move(t.text));
  return out;
}

std::string detokenize(std::span<const std::string> tokens) {
  std::string out;
  bool glue_next = true;
  for (const auto& t : tokens) {
    if (!glue_next && !attaches_left(t)) out += ' ';
    out += t;
    glue_next = attaches_right(t);
  }
  return out;
}

std::vector<std::string> split_characters(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const auto c = static_cast<unsigned char>(text[i]);
    std::size_t len = 1;
    if (c >= 0xf0 && c < 0xf8) len = 4;
    else if (c >= 0xe0) len = 3;
    else if (c >= 0xc0) len = 2;
    else if (c >= 0x80) len = 0;  // stray continuation byte
    bool valid = len > 0 && i + len <= text.size();
    for (std::size_t k = 1; valid && k < len; ++k) {
      valid = (static_cast<unsigned char>(text[i + k]) & 0xc0) == 0x80;
    }
    if (valid) {
      out.emplace_back(text.substr(i, len));
      i += len;
    } else {
      out.emplace_back("\xef\xbf\xbd");
      ++i;
    }
  }
  return out;
}

}  // namespace wikireading::data
