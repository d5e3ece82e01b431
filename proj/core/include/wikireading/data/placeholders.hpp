#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "wikireading/data/vocabulary.hpp"
#include "wikireading/random.hpp"

namespace wikireading::data {

/// Placeholder id -> the document word it stands for.
using PlaceholderMap = std::map<int, std::string>;

struct PlaceholderEncoding {
  std::vector<int> document;
  std::vector<int> answer;
  PlaceholderMap placeholders;
  /// OOV document occurrences left as plain OOV because every placeholder
  /// was already in use.
  std::size_t overflow = 0;
};

/// Encodes a document/answer pair, giving every OOV document occurrence its
/// own placeholder drawn at random without replacement. An OOV answer token
/// takes the placeholder of its first document occurrence; OOV answer tokens
/// absent from the document stay plain OOV.
PlaceholderEncoding apply_placeholders(std::span<const std::string> document, std::span<const std::string> answer,
                                       const Vocabulary& vocab, Rng& rng);

/// Surface tokens for decoded ids; placeholders resolve through `map`, and
/// placeholders missing from it become the OOV marker. `unresolved`, when
/// given, is incremented once per such placeholder.
std::vector<std::string> resolve_placeholders(std::span<const int> ids, const Vocabulary& vocab,
                                              const PlaceholderMap& map, std::size_t* unresolved = nullptr);

}  // namespace wikireading::data
