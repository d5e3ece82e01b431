#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wikireading::data {

struct Token {
  std::string text;
  std::size_t begin = 0;  // byte offsets into the source text
  std::size_t end = 0;
};

/// Splits on ASCII whitespace and emits every ASCII punctuation character as
/// its own token. Case is preserved; bytes >= 0x80 are word characters.
std::vector<std::string> tokenize(std::string_view text);
std::vector<Token> tokenize_with_offsets(std::string_view text);

/// Joins tokens with single spaces, omitting the space before closing
/// punctuation and around joiners ("-", "/", "'").
std::string detokenize(std::span<const std::string> tokens);

/// UTF-8 code points as separate strings. Invalid bytes become U+FFFD.
std::vector<std::string> split_characters(std::string_view text);

template <typename T>
std::vector<T> truncate(std::span<const T> sequence, std::size_t limit) {
  const auto n = sequence.size() < limit ? sequence.size() : limit;
  return std::vector<T>(sequence.begin(), sequence.begin() + static_cast<std::ptrdiff_t>(n));
}

template <typename T>
std::vector<T> truncate(const std::vector<T>& sequence, std::size_t limit) {
  return truncate(std::span<const T>(sequence), limit);
}

}  // namespace wikireading::data
