#include "wikireading/data/vocabulary.hpp"

#include <algorithm>
#include <stdexcept>

#include "wikireading/data/tokenizer.hpp"

namespace wikireading::data {

Vocabulary Vocabulary::from_counts(const std::map<std::string, std::size_t, std::less<>>& counts,
                                   std::size_t max_words, std::size_t placeholder_count) {
  if (max_words == 0) throw std::invalid_argument("vocabulary needs room for at least one word");
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  // counts is already lexicographic, so a stable sort on frequency breaks
  // ties lexicographically.
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  if (ranked.size() > max_words) ranked.resize(max_words);
  std::vector<std::string> words;
  words.reserve(ranked.size());
  for (auto& [w, _] : ranked) words.push_back(std::move(w));
  return from_words(std::move(words), placeholder_count);
}

Vocabulary Vocabulary::from_words(std::vector<std::string> words, std::size_t placeholder_count) {
  Vocabulary v;
  v.placeholder_count_ = placeholder_count;
  v.words_ = std::move(words);
  for (std::size_t i = 0; i < v.words_.size(); ++i) {
    if (!v.ids_.emplace(v.words_[i], v.first_word_id() + static_cast<int>(i)).second) {
      throw std::invalid_argument("duplicate vocabulary word: " + v.words_[i]);
    }
  }
  return v;
}

int Vocabulary::placeholder_id(std::size_t k) const {
  if (k >= placeholder_count_) throw std::out_of_range("placeholder index " + std::to_string(k));
  return kReservedCount + static_cast<int>(k);
}

bool Vocabulary::contains(std::string_view token) const { return ids_.find(token) != ids_.end(); }

int Vocabulary::id(std::string_view token) const {
  auto it = ids_.find(token);
  return it == ids_.end() ? kOov : it->second;
}

std::string Vocabulary::token(int id) const {
  switch (id) {
    case kPad: return "<pad>";
    case kOov: return std::string(kOovMarker);
    case kGo: return "<go>";
    case kEos: return "<eos>";
    case kSep: return "<sep>";
    default: break;
  }
  if (is_placeholder(id)) return "<ph" + std::to_string(id - kReservedCount) + ">";
  if (is_word(id)) return words_[static_cast<std::size_t>(id - first_word_id())];
  throw std::out_of_range("token id " + std::to_string(id) + " outside vocabulary of size " + std::to_string(size()));
}

std::vector<int> Vocabulary::encode(std::span<const std::string> tokens) const {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(id(t));
  return ids;
}

std::vector<std::string> Vocabulary::decode(std::span<const int> ids) const {
  std::vector<std::string> tokens;
  tokens.reserve(ids.size());
  for (int i : ids) tokens.push_back(token(i));
  return tokens;
}

Vocabulary build_vocab(std::span<const std::vector<std::string>> sequences, std::size_t max_words,
                       std::size_t placeholder_count) {
  if (sequences.empty()) throw DataError("cannot build a vocabulary from an empty corpus");
  std::map<std::string, std::size_t, std::less<>> counts;
  for (const auto& seq : sequences) {
    for (const auto& t : seq) ++counts[t];
  }
  return Vocabulary::from_counts(counts, max_words, placeholder_count);
}

Vocabulary build_vocab(std::span<const Instance> corpus, std::size_t max_words, std::size_t placeholder_count) {
  if (corpus.empty()) throw DataError("cannot build a vocabulary from an empty corpus");
  std::vector<std::vector<std::string>> sequences;
  sequences.reserve(corpus.size() * 3);
  for (const auto& instance : corpus) {
    sequences.push_back(tokenize(instance.document));
    sequences.push_back(tokenize(instance.property));
    for (const auto& a : instance.answers) sequences.push_back(tokenize(a));
  }
  return build_vocab(sequences, max_words, placeholder_count);
}

Vocabulary build_char_vocab(std::span<const Instance> corpus, std::size_t total_size) {
  if (corpus.empty()) throw DataError("cannot build a vocabulary from an empty corpus");
  if (total_size <= static_cast<std::size_t>(Vocabulary::kReservedCount)) {
    throw std::invalid_argument("character vocabulary too small for its reserved ids");
  }
  std::map<std::string, std::size_t, std::less<>> counts;
  for (const auto& instance : corpus) {
    for (auto& c : split_characters(instance.document)) ++counts[c];
    for (auto& c : split_characters(instance.property)) ++counts[c];
    for (const auto& a : instance.answers) {
      for (auto& c : split_characters(a)) ++counts[c];
    }
  }
  return Vocabulary::from_counts(counts, total_size - Vocabulary::kReservedCount, 0);
}

}  // namespace wikireading::data
