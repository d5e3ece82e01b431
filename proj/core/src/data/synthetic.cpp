#include "wikireading/data/synthetic.hpp"

#include <cmath>
#include <cstdio>
#include <set>
#include <stdexcept>
#include <tuple>

#include "wikireading/data/dates.hpp"
#include "wikireading/data/labeling.hpp"
#include "wikireading/data/tokenizer.hpp"
#include "wikireading/random.hpp"

namespace wikireading::data {

namespace {

constexpr std::string_view kConsonants = "bdfgklmnprstvz";
constexpr std::string_view kVowels = "aeiou";

// Draws pronounceable pseudo-words, never repeating one within a corpus.
class WordSource {
 public:
  explicit WordSource(Rng& rng) : rng_(rng) {}

  std::string word(std::size_t syllables, bool capitalized) {
    for (;;) {
      std::string w;
      for (std::size_t i = 0; i < syllables; ++i) {
        w += kConsonants[rng_.below(kConsonants.size())];
        w += kVowels[rng_.below(kVowels.size())];
      }
      if (rng_.below(2)) w += kConsonants[rng_.below(kConsonants.size())];
      if (capitalized) w[0] = static_cast<char>(w[0] - 'a' + 'A');
      if (used_.insert(w).second) return w;
    }
  }

 private:
  Rng& rng_;
  std::set<std::string> used_;
};

std::vector<std::size_t> allocate_counts(std::size_t n, const std::vector<double>& weights) {
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("categorical weights must be finite and >= 0");
    total += w;
  }
  if (total <= 0.0) throw std::invalid_argument("categorical weights must not all be zero");
  std::vector<std::size_t> counts(weights.size());
  std::vector<double> remainder(weights.size());
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double quota = static_cast<double>(n) * weights[i] / total;
    counts[i] = static_cast<std::size_t>(std::floor(quota));
    remainder[i] = quota - static_cast<double>(counts[i]);
    assigned += counts[i];
  }
  while (assigned < n) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < weights.size(); ++i) {
      if (remainder[i] > remainder[best]) best = i;
    }
    ++counts[best];
    remainder[best] = -1.0;
    ++assigned;
  }
  return counts;
}

double weight_entropy(const std::vector<double>& weights) {
  double total = 0.0;
  std::size_t support = 0;
  for (double w : weights) {
    total += w;
    if (w > 0.0) ++support;
  }
  if (support < 2) return 0.0;
  double h = 0.0;
  for (double w : weights) {
    if (w > 0.0) h -= (w / total) * std::log(w / total);
  }
  return h / std::log(static_cast<double>(support));
}

Date random_date(Rng& rng) {
  Date d;
  d.year = 1700 + static_cast<int>(rng.below(321));
  d.month = 1 + static_cast<int>(rng.below(12));
  d.day = 1 + static_cast<int>(rng.below(31));
  while (!is_valid_date(d)) --d.day;
  return d;
}

std::string date_surface(const Date& d, Rng& rng, bool canonical_only) {
  const std::string canonical = format_timestamp(d);
  if (canonical_only) return canonical;
  const std::string month = canonical.substr(canonical.find(' ') + 1, canonical.rfind(' ') - canonical.find(' ') - 1);
  char iso[16];
  switch (rng.below(4)) {
    case 0: return canonical;
    case 1: return month + " " + std::to_string(d.day) + ", " + std::to_string(d.year);
    case 2: return month + " " + std::to_string(d.day) + " " + std::to_string(d.year);
    default:
      std::snprintf(iso, sizeof iso, "%04d-%02d-%02d", d.year, d.month, d.day);
      return iso;
  }
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace

const char* to_string(SyntheticKind kind) {
  switch (kind) {
    case SyntheticKind::kCategorical: return "categorical";
    case SyntheticKind::kRelational: return "relational";
    case SyntheticKind::kDate: return "date";
  }
  return "unknown";
}

SyntheticCorpus generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed) {
  SyntheticCorpus corpus;
  const std::size_t n = spec.documents;
  const bool has_properties = !spec.categorical.empty() || !spec.relational.empty() || !spec.dates.empty();
  if (n == 0 || !has_properties) return corpus;

  Rng rng(mix64(seed));
  WordSource words(rng);

  // Per-property surface material, fixed for the whole corpus.
  struct CategoricalPlan {
    std::string trigger;
    std::vector<std::string> values;
    std::vector<std::string> cues;
    std::vector<std::size_t> assignment;  // value index per entity
  };
  std::vector<CategoricalPlan> categorical;
  for (const auto& c : spec.categorical) {
    if (c.values == 0) throw std::invalid_argument("categorical property '" + c.name + "' needs at least one value");
    if (!c.weights.empty() && c.weights.size() != c.values) {
      throw std::invalid_argument("categorical property '" + c.name + "' has mismatched weights");
    }
    CategoricalPlan plan;
    plan.trigger = words.word(2, false);
    for (std::size_t v = 0; v < c.values; ++v) {
      plan.values.push_back(words.word(2, false));
      plan.cues.push_back(words.word(2, false));
    }
    const auto weights = c.weights.empty() ? std::vector<double>(c.values, 1.0) : c.weights;
    const auto counts = allocate_counts(n, weights);
    for (std::size_t v = 0; v < counts.size(); ++v) plan.assignment.insert(plan.assignment.end(), counts[v], v);
    rng.shuffle(plan.assignment.begin(), plan.assignment.end());
    categorical.push_back(std::move(plan));
    corpus.truth.push_back({c.name, n, weight_entropy(weights), classify_property(weight_entropy(weights))});
  }

  std::vector<std::string> relational_triggers;
  for (const auto& r : spec.relational) {
    if (r.values_per_instance == 0 || r.tokens_per_value == 0) {
      throw std::invalid_argument("relational property '" + r.name + "' needs positive value and token counts");
    }
    relational_triggers.push_back(words.word(2, false));
    const double h = n > 1 ? 1.0 : 0.0;
    corpus.truth.push_back({r.name, n, h, classify_property(h)});
  }

  // Dates are drawn without repetition from 1700-2020 (~117k days).
  if (n * spec.dates.size() > 100000) throw std::invalid_argument("too many date instances for distinct dates");
  std::vector<std::string> date_triggers;
  for (const auto& d : spec.dates) {
    date_triggers.push_back(words.word(2, false));
    const double h = n > 1 ? 1.0 : 0.0;
    corpus.truth.push_back({d.name, n, h, classify_property(h)});
  }

  std::vector<std::string> filler;
  if (spec.filler_sentences > 0) {
    for (int i = 0; i < 40; ++i) filler.push_back(words.word(1 + rng.below(2), false));
  }

  std::set<std::tuple<int, int, int>> used_dates;
  for (std::size_t e = 0; e < n; ++e) {
    const std::string entity = words.word(3, true);
    std::vector<std::string> sentences;
    struct Pending {
      std::string property;
      std::vector<std::string> answers;
      SyntheticKind kind;
    };
    std::vector<Pending> pending;

    for (std::size_t p = 0; p < categorical.size(); ++p) {
      const auto& plan = categorical[p];
      const std::size_t v = plan.assignment[e];
      sentences.push_back(entity + " " + plan.trigger + " " + plan.cues[v] + ".");
      pending.push_back({spec.categorical[p].name, {plan.values[v]}, SyntheticKind::kCategorical});
    }
    for (std::size_t p = 0; p < spec.relational.size(); ++p) {
      const auto& r = spec.relational[p];
      std::vector<std::string> values;
      for (std::size_t k = 0; k < r.values_per_instance; ++k) {
        std::vector<std::string> tokens;
        for (std::size_t t = 0; t < r.tokens_per_value; ++t) tokens.push_back(words.word(3, true));
        values.push_back(join(tokens, " "));
      }
      sentences.push_back(entity + " " + relational_triggers[p] + " " + join(values, " and ") + ".");
      pending.push_back({r.name, values, SyntheticKind::kRelational});
    }
    for (std::size_t p = 0; p < spec.dates.size(); ++p) {
      Date d = random_date(rng);
      while (!used_dates.emplace(d.year, d.month, d.day).second) d = random_date(rng);
      sentences.push_back(entity + " " + date_triggers[p] + " " + date_surface(d, rng, spec.dates[p].canonical_surface_only) +
                          ".");
      pending.push_back({spec.dates[p].name, {format_timestamp(d)}, SyntheticKind::kDate});
    }
    for (std::size_t f = 0; f < spec.filler_sentences; ++f) {
      std::vector<std::string> tokens;
      const std::size_t len = 3 + rng.below(3);
      for (std::size_t t = 0; t < len; ++t) tokens.push_back(filler[rng.below(filler.size())]);
      sentences.push_back(join(tokens, " ") + ".");
    }
    rng.shuffle(sentences.begin(), sentences.end());
    const std::string document = join(sentences, " ");
    const auto doc_tokens = tokenize(document);

    for (auto& item : pending) {
      bool verbatim = false;
      for (const auto& a : item.answers) verbatim = verbatim || !exact_matches(doc_tokens, tokenize(a)).empty();
      corpus.instances.push_back(make_instance(document, item.property, std::move(item.answers),
                                               "e" + std::to_string(e) + "/" + item.property));
      corpus.kinds.push_back(item.kind);
      corpus.verbatim.push_back(verbatim);
    }
  }
  return corpus;
}

}  // namespace wikireading::data
