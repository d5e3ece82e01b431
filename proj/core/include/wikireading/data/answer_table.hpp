#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wikireading/data/instance.hpp"

namespace wikireading::data {

/// The closed answer set of a classifier: the most frequent answer values of
/// a training corpus, ranked like a vocabulary (frequency, then lexicographic).
class AnswerTable {
 public:
  AnswerTable() = default;
  /// Every member of every answer set counts once.
  static AnswerTable build(std::span<const Instance> training, std::size_t max_answers);
  static AnswerTable from_values(std::vector<std::string> values);

  std::size_t size() const noexcept { return values_.size(); }
  const std::vector<std::string>& values() const noexcept { return values_; }
  const std::string& value(std::size_t index) const { return values_.at(index); }
  std::optional<std::size_t> index(std::string_view value) const;
  bool contains(std::string_view value) const { return index(value).has_value(); }

  /// Classification target for an instance: the lexicographically first gold
  /// value present in the table, or nothing if none is.
  std::optional<std::size_t> target(const Instance& instance) const;

 private:
  std::vector<std::string> values_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

}  // namespace wikireading::data
