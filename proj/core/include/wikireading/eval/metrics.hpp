#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wikireading/data/instance.hpp"

namespace wikireading::eval {

/// Answers compare equal after Unicode NFC normalization and stripping
/// surrounding whitespace. Nothing else is folded.
std::string normalize_answer(std::string_view answer);

/// F1 between a predicted and a gold answer set under exact match. Empty
/// strings in `predicted` are ignored; an empty prediction scores 0.
/// Throws std::invalid_argument for an empty gold set.
double instance_f1(std::span<const std::string> predicted, std::span<const std::string> gold);

/// Unweighted mean of instance_f1 over `gold`. predictions[i] belongs to
/// gold[i]; missing trailing predictions score 0. Returns 0 for no instances.
double mean_f1(std::span<const std::vector<std::string>> predictions, std::span<const data::Instance> gold);

/// F1 of the best single value: 2 / (1 + |gold|) after normalization.
double best_single_value_f1(std::span<const std::string> gold);

}  // namespace wikireading::eval
