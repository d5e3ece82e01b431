#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "wikireading/data/instance.hpp"

namespace wikireading::data {

enum class PropertyClass { kCategorical, kRelational };

const char* to_string(PropertyClass c);

/// Properties whose scaled answer entropy falls below this are categorical.
inline constexpr double kCategoricalEntropyThreshold = 0.7;

struct PropertyStats {
  std::string property;
  std::size_t frequency = 0;
  double scaled_entropy = 0.0;  // in [0, 1]
  PropertyClass cls = PropertyClass::kCategorical;
};

/// Shannon entropy of the value distribution divided by the entropy of the
/// uniform distribution over the same support. A single distinct value
/// scores 0.
double scaled_entropy(const std::map<std::string, std::size_t, std::less<>>& value_counts);

/// Scaled entropy of the answer values of `instances`, which should all share
/// one property. Each member of an answer set counts as one observation.
double answer_entropy(std::span<const Instance> instances);

PropertyClass classify_property(double scaled_entropy);

/// One row per property, sorted by descending frequency then name.
std::vector<PropertyStats> compute_property_stats(std::span<const Instance> instances);

/// Corpus-level measures reported next to the property table.
struct CorpusSummary {
  std::size_t instances = 0;
  std::size_t properties = 0;
  std::size_t documents = 0;
  double instances_per_document_mean = 0.0;
  double instances_per_document_median = 0.0;
  std::size_t instances_per_document_max = 0;
  double document_length_mean = 0.0;    // words
  double document_length_median = 0.0;  // words
  double categorical_instance_share = 0.0;
  /// Fraction of answer values occurring exactly once in the corpus.
  double answer_uniqueness_rate = 0.0;
  /// Fraction of instances with some answer present verbatim (exact token
  /// match) in the document.
  double verbatim_answer_rate = 0.0;
};

CorpusSummary summarize_corpus(std::span<const Instance> instances, std::span<const PropertyStats> stats);

struct DatasetSplit {
  std::vector<Instance> train;
  std::vector<Instance> validation;
  std::vector<Instance> test;
};

/// Assigns each instance independently to train/validation/test with
/// probabilities 0.85/0.10/0.05, from a hash of the seed and the instance's
/// content. Order within each split follows the input.
DatasetSplit split_dataset(std::span<const Instance> instances, std::uint64_t seed);

}  // namespace wikireading::data
