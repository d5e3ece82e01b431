#include "wikireading/data/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wikireading/data/labeling.hpp"
#include "wikireading/data/tokenizer.hpp"
#include "wikireading/random.hpp"

namespace wikireading::data {

const char* to_string(PropertyClass c) {
  return c == PropertyClass::kCategorical ? "categorical" : "relational";
}

double scaled_entropy(const std::map<std::string, std::size_t, std::less<>>& value_counts) {
  if (value_counts.size() < 2) return 0.0;
  const auto first = value_counts.begin()->second;
  if (std::all_of(value_counts.begin(), value_counts.end(), [&](const auto& kv) { return kv.second == first; })) {
    return 1.0;  // exact for every k, where h / log(k) can round below 1
  }
  double total = 0.0;
  for (const auto& [_, n] : value_counts) total += static_cast<double>(n);
  double h = 0.0;
  for (const auto& [_, n] : value_counts) {
    if (n == 0) continue;
    const double p = static_cast<double>(n) / total;
    h -= p * std::log(p);
  }
  const double scaled = h / std::log(static_cast<double>(value_counts.size()));
  return std::clamp(scaled, 0.0, 1.0);
}

double answer_entropy(std::span<const Instance> instances) {
  std::map<std::string, std::size_t, std::less<>> counts;
  for (const auto& instance : instances) {
    for (const auto& a : instance.answers) ++counts[a];
  }
  return scaled_entropy(counts);
}

PropertyClass classify_property(double entropy) {
  return entropy < kCategoricalEntropyThreshold ? PropertyClass::kCategorical : PropertyClass::kRelational;
}

std::vector<PropertyStats> compute_property_stats(std::span<const Instance> instances) {
  std::map<std::string, std::vector<Instance>, std::less<>> by_property;
  for (const auto& instance : instances) by_property[instance.property].push_back(instance);
  std::vector<PropertyStats> out;
  for (const auto& [property, members] : by_property) {
    const double h = answer_entropy(members);
    out.push_back({property, members.size(), h, classify_property(h)});
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.frequency > b.frequency; });
  return out;
}

namespace {

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

double mean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

}  // namespace

CorpusSummary summarize_corpus(std::span<const Instance> instances, std::span<const PropertyStats> stats) {
  CorpusSummary s;
  s.instances = instances.size();
  s.properties = stats.size();
  if (instances.empty()) return s;

  std::map<std::string_view, std::size_t> per_document;
  std::map<std::string_view, std::size_t> value_counts;
  std::size_t verbatim = 0;
  for (const auto& instance : instances) {
    ++per_document[instance.document];
    for (const auto& a : instance.answers) ++value_counts[a];
    const auto doc_tokens = tokenize(instance.document);
    for (const auto& a : instance.answers) {
      if (!exact_matches(doc_tokens, tokenize(a)).empty()) {
        ++verbatim;
        break;
      }
    }
  }
  s.documents = per_document.size();
  std::vector<double> counts, lengths;
  for (const auto& [doc, n] : per_document) {
    counts.push_back(static_cast<double>(n));
    lengths.push_back(static_cast<double>(tokenize(doc).size()));
    s.instances_per_document_max = std::max(s.instances_per_document_max, n);
  }
  s.instances_per_document_mean = mean(counts);
  s.instances_per_document_median = median(counts);
  s.document_length_mean = mean(lengths);
  s.document_length_median = median(lengths);

  std::size_t categorical = 0;
  for (const auto& p : stats) {
    if (p.cls == PropertyClass::kCategorical) categorical += p.frequency;
  }
  s.categorical_instance_share = static_cast<double>(categorical) / static_cast<double>(instances.size());

  const auto unique = std::count_if(value_counts.begin(), value_counts.end(), [](const auto& kv) { return kv.second == 1; });
  s.answer_uniqueness_rate = value_counts.empty() ? 0.0 : static_cast<double>(unique) / static_cast<double>(value_counts.size());
  s.verbatim_answer_rate = static_cast<double>(verbatim) / static_cast<double>(instances.size());
  return s;
}

DatasetSplit split_dataset(std::span<const Instance> instances, std::uint64_t seed) {
  DatasetSplit out;
  for (const auto& instance : instances) {
    std::uint64_t h = fnv1a(instance.document);
    h = fnv1a(std::string_view("\x1f"), h);
    h = fnv1a(instance.property, h);
    for (const auto& a : instance.answers) {
      h = fnv1a(std::string_view("\x1e"), h);
      h = fnv1a(a, h);
    }
    const double u = static_cast<double>(mix64(h ^ mix64(seed)) >> 11) * 0x1.0p-53;
    if (u < 0.85) out.train.push_back(instance);
    else if (u < 0.95) out.validation.push_back(instance);
    else out.test.push_back(instance);
  }
  return out;
}

}  // namespace wikireading::data
