#include "wikireading/data/placeholders.hpp"

#include <numeric>

namespace wikireading::data {

PlaceholderEncoding apply_placeholders(std::span<const std::string> document, std::span<const std::string> answer,
                                       const Vocabulary& vocab, Rng& rng) {
  PlaceholderEncoding out;
  std::vector<std::size_t> pool(vocab.placeholder_count());
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  rng.shuffle(pool.begin(), pool.end());
  std::size_t next = 0;

  std::map<std::string, int, std::less<>> first_occurrence;
  out.document.reserve(document.size());
  for (const auto& token : document) {
    int id = vocab.id(token);
    if (id == Vocabulary::kOov) {
      if (next < pool.size()) {
        id = vocab.placeholder_id(pool[next++]);
        out.placeholders.emplace(id, token);
        first_occurrence.emplace(token, id);
      } else {
        ++out.overflow;
      }
    }
    out.document.push_back(id);
  }

  out.answer.reserve(answer.size());
  for (const auto& token : answer) {
    int id = vocab.id(token);
    if (id == Vocabulary::kOov) {
      if (auto it = first_occurrence.find(token); it != first_occurrence.end()) id = it->second;
    }
    out.answer.push_back(id);
  }
  return out;
}

std::vector<std::string> resolve_placeholders(std::span<const int> ids, const Vocabulary& vocab,
                                              const PlaceholderMap& map, std::size_t* unresolved) {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (int id : ids) {
    if (vocab.is_placeholder(id)) {
      if (auto it = map.find(id); it != map.end()) {
        out.push_back(it->second);
      } else {
        out.emplace_back(Vocabulary::kOovMarker);
        if (unresolved) ++*unresolved;
      }
    } else {
      out.push_back(vocab.token(id));
    }
  }
  return out;
}

}  // namespace wikireading::data
