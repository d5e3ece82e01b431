#pragma once

#include <span>
#include <string>

#include "wikireading/data/answer_table.hpp"
#include "wikireading/data/instance.hpp"
#include "wikireading/data/vocabulary.hpp"

namespace wikireading::eval {

// Each bound is the Mean F1 of an oracle restricted like a model family:
// per instance it picks the best single gold value the family can emit.

/// Any single-value predictor.
double single_value_bound(std::span<const data::Instance> gold);

/// A classifier over the values of `table`.
double classifier_bound(std::span<const data::Instance> gold, const data::AnswerTable& table);
/// A classifier over the `max_answers` most frequent values of `training`.
double classifier_bound(std::span<const data::Instance> gold, std::span<const data::Instance> training,
                        std::size_t max_answers);

/// An extractor emitting document spans (dates matched by value).
double extraction_bound(std::span<const data::Instance> gold);

/// A word decoder over `vocab` emitting at most `max_words` tokens.
double word_decoder_bound(std::span<const data::Instance> gold, const data::Vocabulary& vocab, std::size_t max_words);
/// As word_decoder_bound, but out-of-vocabulary tokens may be copied from the
/// document.
double copy_decoder_bound(std::span<const data::Instance> gold, const data::Vocabulary& vocab, std::size_t max_words);
/// A character decoder over `chars` emitting at most `max_chars` characters.
double char_decoder_bound(std::span<const data::Instance> gold, const data::Vocabulary& chars, std::size_t max_chars);

enum class MethodClass { kClassifier, kExtraction, kWordSeq2Seq, kPlaceholderSeq2Seq, kCharSeq2Seq };

const char* to_string(MethodClass method);

/// What a method class's bound needs to know about the trained model.
struct BoundContext {
  const data::AnswerTable* answers = nullptr;  // kClassifier
  const data::Vocabulary* vocab = nullptr;     // word decoders, or characters for kCharSeq2Seq
  std::size_t max_output = 0;                  // decoder length cap
};

/// Throws std::invalid_argument if `context` lacks what `method` needs.
double method_bound(MethodClass method, std::span<const data::Instance> gold, const BoundContext& context);

}  // namespace wikireading::eval
