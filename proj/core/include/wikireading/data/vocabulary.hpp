#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wikireading/data/instance.hpp"

namespace wikireading::data {

/// Frequency-ranked token table.
///
/// Id layout: [0, kReservedCount) special tokens, then `placeholder_count`
/// placeholder ids, then words by descending frequency (ties broken
/// lexicographically). Tokens outside the table encode to kOov.
class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kOov = 1;
  static constexpr int kGo = 2;
  static constexpr int kEos = 3;
  static constexpr int kSep = 4;
  static constexpr int kReservedCount = 5;

  static constexpr std::string_view kOovMarker = "<unk>";

  Vocabulary() = default;

  /// Keeps the `max_words` most frequent tokens of `counts`.
  static Vocabulary from_counts(const std::map<std::string, std::size_t, std::less<>>& counts, std::size_t max_words,
                                std::size_t placeholder_count = 0);
  /// Rebuilds a vocabulary from its ranked word list (e.g. a checkpoint).
  static Vocabulary from_words(std::vector<std::string> words, std::size_t placeholder_count);

  std::size_t size() const noexcept { return static_cast<std::size_t>(first_word_id()) + words_.size(); }
  std::size_t word_count() const noexcept { return words_.size(); }
  std::size_t placeholder_count() const noexcept { return placeholder_count_; }
  const std::vector<std::string>& words() const noexcept { return words_; }

  int first_word_id() const noexcept { return kReservedCount + static_cast<int>(placeholder_count_); }
  int placeholder_id(std::size_t k) const;
  bool is_placeholder(int id) const noexcept {
    return id >= kReservedCount && id < first_word_id();
  }
  bool is_word(int id) const noexcept { return id >= first_word_id() && id < static_cast<int>(size()); }

  bool contains(std::string_view token) const;
  int id(std::string_view token) const;
  /// Surface form of an id; reserved ids and placeholders render as markers.
  std::string token(int id) const;

  std::vector<int> encode(std::span<const std::string> tokens) const;
  std::vector<std::string> decode(std::span<const int> ids) const;

 private:
  std::vector<std::string> words_;
  std::map<std::string, int, std::less<>> ids_;
  std::size_t placeholder_count_ = 0;
};

/// Word vocabulary over tokenized documents, properties and answers.
/// Throws DataError for an empty corpus; `max_words` must be positive.
Vocabulary build_vocab(std::span<const Instance> corpus, std::size_t max_words, std::size_t placeholder_count = 0);
/// Same over pre-tokenized sequences.
Vocabulary build_vocab(std::span<const std::vector<std::string>> sequences, std::size_t max_words,
                       std::size_t placeholder_count = 0);
/// Character vocabulary with `total_size` entries including reserved ids.
Vocabulary build_char_vocab(std::span<const Instance> corpus, std::size_t total_size);

}  // namespace wikireading::data
