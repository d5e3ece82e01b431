#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wikireading/data/instance.hpp"
#include "wikireading/data/stats.hpp"

namespace wikireading::data {

/// A closed-set property. The document never states the value; it carries a
/// cue word tied to the value from which the answer can be inferred.
struct CategoricalSpec {
  std::string name;
  std::size_t values = 2;
  /// Relative value weights; empty means uniform. Counts per value are
  /// allocated by largest remainder, so measured entropy tracks the weights.
  std::vector<double> weights;
};

/// An open-set property whose answer is a freshly generated name, stated
/// verbatim in the document.
struct RelationalSpec {
  std::string name;
  std::size_t values_per_instance = 1;
  std::size_t tokens_per_value = 1;
};

/// A date-valued property. The document uses one of several surface forms;
/// the answer is always the canonical "D Month YYYY" form.
struct DateSpec {
  std::string name;
  bool canonical_surface_only = false;
};

struct SyntheticSpec {
  /// Number of entities; each entity gets one document and one instance per
  /// property.
  std::size_t documents = 0;
  std::vector<CategoricalSpec> categorical;
  std::vector<RelationalSpec> relational;
  std::vector<DateSpec> dates;
  /// Distractor sentences of common words added to each document.
  std::size_t filler_sentences = 0;
};

enum class SyntheticKind { kCategorical, kRelational, kDate };

const char* to_string(SyntheticKind kind);

struct SyntheticCorpus {
  std::vector<Instance> instances;
  /// Kind of the property that produced each instance.
  std::vector<SyntheticKind> kinds;
  /// Whether some answer occurs as an exact token sequence in the document.
  std::vector<bool> verbatim;
  /// Entropy and class implied by the construction, one row per property in
  /// spec order.
  std::vector<PropertyStats> truth;
};

/// Deterministic under `seed`. Instance order is entity-major, properties in
/// spec order (categorical, relational, dates).
SyntheticCorpus generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed);

}  // namespace wikireading::data
