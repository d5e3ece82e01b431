#include "wikireading/eval/bounds.hpp"

#include <algorithm>
#include <stdexcept>

#include "wikireading/data/labeling.hpp"
#include "wikireading/data/tokenizer.hpp"
#include "wikireading/eval/metrics.hpp"

namespace wikireading::eval {

namespace {

template <typename Producible>
double oracle_bound(std::span<const data::Instance> gold, Producible producible) {
  if (gold.empty()) return 0.0;
  double total = 0.0;
  for (const auto& instance : gold) {
    for (const auto& a : instance.answers) {
      if (producible(instance, a)) {
        total += best_single_value_f1(instance.answers);
        break;
      }
    }
  }
  return total / static_cast<double>(gold.size());
}

}  // namespace

double single_value_bound(std::span<const data::Instance> gold) {
  return oracle_bound(gold, [](const data::Instance&, const std::string&) { return true; });
}

double classifier_bound(std::span<const data::Instance> gold, const data::AnswerTable& table) {
  return oracle_bound(gold, [&](const data::Instance&, const std::string& a) { return table.contains(a); });
}

double classifier_bound(std::span<const data::Instance> gold, std::span<const data::Instance> training,
                        std::size_t max_answers) {
  return classifier_bound(gold, data::AnswerTable::build(training, max_answers));
}

double extraction_bound(std::span<const data::Instance> gold) {
  return oracle_bound(gold, [](const data::Instance& instance, const std::string& a) {
    return !data::answer_matches(data::tokenize(instance.document), a).empty();
  });
}

double word_decoder_bound(std::span<const data::Instance> gold, const data::Vocabulary& vocab, std::size_t max_words) {
  return oracle_bound(gold, [&](const data::Instance&, const std::string& a) {
    const auto tokens = data::tokenize(a);
    if (tokens.empty() || tokens.size() > max_words) return false;
    for (const auto& t : tokens) {
      if (!vocab.contains(t)) return false;
    }
    return true;
  });
}

double copy_decoder_bound(std::span<const data::Instance> gold, const data::Vocabulary& vocab, std::size_t max_words) {
  return oracle_bound(gold, [&](const data::Instance& instance, const std::string& a) {
    const auto tokens = data::tokenize(a);
    if (tokens.empty() || tokens.size() > max_words) return false;
    const auto doc = data::tokenize(instance.document);
    for (const auto& t : tokens) {
      if (!vocab.contains(t) && std::find(doc.begin(), doc.end(), t) == doc.end()) return false;
    }
    return true;
  });
}

double char_decoder_bound(std::span<const data::Instance> gold, const data::Vocabulary& chars, std::size_t max_chars) {
  return oracle_bound(gold, [&](const data::Instance&, const std::string& a) {
    const auto cs = data::split_characters(a);
    if (cs.empty() || cs.size() > max_chars) return false;
    for (const auto& c : cs) {
      if (!chars.contains(c)) return false;
    }
    return true;
  });
}

const char* to_string(MethodClass method) {
  switch (method) {
    case MethodClass::kClassifier: return "classifier";
    case MethodClass::kExtraction: return "extraction";
    case MethodClass::kWordSeq2Seq: return "word_seq2seq";
    case MethodClass::kPlaceholderSeq2Seq: return "placeholder_seq2seq";
    case MethodClass::kCharSeq2Seq: return "char_seq2seq";
  }
  return "unknown";
}

double method_bound(MethodClass method, std::span<const data::Instance> gold, const BoundContext& context) {
  auto need_vocab = [&] {
    if (!context.vocab) throw std::invalid_argument(std::string("bound for ") + to_string(method) + " needs a vocabulary");
  };
  switch (method) {
    case MethodClass::kClassifier:
      if (!context.answers) throw std::invalid_argument("classifier bound needs an answer table");
      return classifier_bound(gold, *context.answers);
    case MethodClass::kExtraction:
      return extraction_bound(gold);
    case MethodClass::kWordSeq2Seq:
      need_vocab();
      return word_decoder_bound(gold, *context.vocab, context.max_output);
    case MethodClass::kPlaceholderSeq2Seq:
      need_vocab();
      return copy_decoder_bound(gold, *context.vocab, context.max_output);
    case MethodClass::kCharSeq2Seq:
      need_vocab();
      return char_decoder_bound(gold, *context.vocab, context.max_output);
  }
  throw std::invalid_argument("unknown method class");
}

}  // namespace wikireading::eval
