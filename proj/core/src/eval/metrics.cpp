#include "wikireading/eval/metrics.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include <unicode/normalizer2.h>
#include <unicode/unistr.h>

namespace wikireading::eval {

namespace {

bool is_ascii(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return static_cast<unsigned char>(c) < 0x80; });
}

std::string strip_ascii(std::string_view s) {
  constexpr std::string_view kSpace = " \t\n\r\f\v";
  const auto b = s.find_first_not_of(kSpace);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(kSpace);
  return std::string(s.substr(b, e - b + 1));
}

std::set<std::string> normalized_set(std::span<const std::string> answers) {
  std::set<std::string> out;
  for (const auto& a : answers) {
    auto n = normalize_answer(a);
    if (!n.empty()) out.insert(std::move(n));
  }
  return out;
}

}  // namespace

std::string normalize_answer(std::string_view answer) {
  if (is_ascii(answer)) return strip_ascii(answer);
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw std::runtime_error("ICU NFC normalizer unavailable");
  auto text = icu::UnicodeString::fromUTF8(icu::StringPiece(answer.data(), static_cast<int32_t>(answer.size())));
  icu::UnicodeString normalized = nfc->normalize(text, status);
  if (U_FAILURE(status)) throw std::runtime_error("NFC normalization failed");
  normalized.trim();
  std::string out;
  normalized.toUTF8String(out);
  return out;
}

double instance_f1(std::span<const std::string> predicted, std::span<const std::string> gold) {
  const auto g = normalized_set(gold);
  if (g.empty()) throw std::invalid_argument("instance_f1: gold answer set is empty");
  const auto p = normalized_set(predicted);
  if (p.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& a : p) hits += g.count(a);
  if (hits == 0) return 0.0;
  const double precision = static_cast<double>(hits) / static_cast<double>(p.size());
  const double recall = static_cast<double>(hits) / static_cast<double>(g.size());
  return 2.0 * precision * recall / (precision + recall);
}

double mean_f1(std::span<const std::vector<std::string>> predictions, std::span<const data::Instance> gold) {
  if (gold.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (i < predictions.size()) total += instance_f1(predictions[i], gold[i].answers);
  }
  return total / static_cast<double>(gold.size());
}

double best_single_value_f1(std::span<const std::string> gold) {
  const auto g = normalized_set(gold);
  if (g.empty()) throw std::invalid_argument("best_single_value_f1: gold answer set is empty");
  return 2.0 / (1.0 + static_cast<double>(g.size()));
}

}  // namespace wikireading::eval
