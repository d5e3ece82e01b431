#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace wikireading::data {

using Span = std::pair<std::size_t, std::size_t>;  // token range [first, second)

/// Per-position answer labels for one document.
struct LabeledSequence {
  std::vector<int> labels;  // 0/1, one per document token
  bool answer_present = false;
};

/// Every [begin, end) where the tokens of `answer` occur contiguously and
/// completely in `document`.
std::vector<Span> exact_matches(std::span<const std::string> document, std::span<const std::string> answer);

/// Exact matches plus, when `answer` parses as a date, every document date
/// denoting the same (day, month, year).
std::vector<Span> answer_matches(std::span<const std::string> document, const std::string& answer);

/// Distant-supervision labels: a position is 1 iff it lies inside a match of
/// any answer. answer_present is false when nothing matched.
LabeledSequence label_positions(std::span<const std::string> document, std::span<const std::string> answers);

}  // namespace wikireading::data
