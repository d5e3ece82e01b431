#include "wikireading/data/labeling.hpp"

#include <algorithm>

#include "wikireading/data/dates.hpp"
#include "wikireading/data/tokenizer.hpp"

namespace wikireading::data {

std::vector<Span> exact_matches(std::span<const std::string> document, std::span<const std::string> answer) {
  std::vector<Span> out;
  if (answer.empty() || answer.size() > document.size()) return out;
  for (std::size_t i = 0; i + answer.size() <= document.size(); ++i) {
    if (std::equal(answer.begin(), answer.end(), document.begin() + static_cast<std::ptrdiff_t>(i))) {
      out.emplace_back(i, i + answer.size());
    }
  }
  return out;
}

std::vector<Span> answer_matches(std::span<const std::string> document, const std::string& answer) {
  const auto answer_tokens = tokenize(answer);
  auto out = exact_matches(document, answer_tokens);
  if (auto date = parse_date(answer)) {
    for (const auto& m : find_dates(document)) {
      if (m.date == *date) out.emplace_back(m.begin, m.end);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
  }
  return out;
}

LabeledSequence label_positions(std::span<const std::string> document, std::span<const std::string> answers) {
  LabeledSequence out;
  out.labels.assign(document.size(), 0);
  for (const auto& answer : answers) {
    for (const auto& [begin, end] : answer_matches(document, answer)) {
      std::fill(out.labels.begin() + static_cast<std::ptrdiff_t>(begin),
                out.labels.begin() + static_cast<std::ptrdiff_t>(end), 1);
      out.answer_present = true;
    }
  }
  return out;
}

}  // namespace wikireading::data
