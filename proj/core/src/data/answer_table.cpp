#include "wikireading/data/answer_table.hpp"

#include <algorithm>
#include <stdexcept>

namespace wikireading::data {

AnswerTable AnswerTable::build(std::span<const Instance> training, std::size_t max_answers) {
  if (max_answers == 0) throw std::invalid_argument("answer table needs at least one entry");
  std::map<std::string, std::size_t, std::less<>> counts;
  for (const auto& instance : training) {
    for (const auto& a : instance.answers) ++counts[a];
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  if (ranked.size() > max_answers) ranked.resize(max_answers);
  std::vector<std::string> values;
  values.reserve(ranked.size());
  for (auto& [v, _] : ranked) values.push_back(std::move(v));
  return from_values(std::move(values));
}

AnswerTable AnswerTable::from_values(std::vector<std::string> values) {
  AnswerTable table;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!table.index_.emplace(values[i], i).second) throw std::invalid_argument("duplicate answer value: " + values[i]);
  }
  table.values_ = std::move(values);
  return table;
}

std::optional<std::size_t> AnswerTable::index(std::string_view value) const {
  if (auto it = index_.find(value); it != index_.end()) return it->second;
  return std::nullopt;
}

std::optional<std::size_t> AnswerTable::target(const Instance& instance) const {
  std::optional<std::size_t> best;
  const std::string* best_value = nullptr;
  for (const auto& a : instance.answers) {
    if (auto i = index(a); i && (!best_value || a < *best_value)) {
      best = i;
      best_value = &a;
    }
  }
  return best;
}

}  // namespace wikireading::data
