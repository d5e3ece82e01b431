#pragma once

#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wikireading/data/instance.hpp"
#include "wikireading/data/stats.hpp"

namespace wikireading::eval {

enum class Section { kCategorical, kRelational, kDate };

const char* to_string(Section section);

/// Property names always reported as dates.
const std::set<std::string, std::less<>>& date_property_names();

/// Share of a property's instances whose answers must all be canonical dates
/// for it to count as a date property.
inline constexpr double kDateAnswerShare = 0.9;

struct PropertyRow {
  std::string property;
  Section section = Section::kRelational;
  std::size_t frequency = 0;  // from corpus statistics, used for ordering
  std::size_t instances = 0;  // evaluated instances
  double mean_f1 = 0.0;
};

struct EvalReport {
  std::string method;
  double mean_f1 = 0.0;
  std::optional<double> bound;
  std::size_t instances = 0;
  // Unset when the section has no instances.
  std::optional<double> categorical;
  std::optional<double> relational;
  std::optional<double> date;
  /// Sections in order categorical, relational, date; within a section by
  /// descending frequency, then name.
  std::vector<PropertyRow> rows;
};

/// Scores `predictions` (aligned with `gold`) overall, per section and per
/// property. Properties are placed in the date section by name or answer
/// format, otherwise by the class in `stats`; properties absent from `stats`
/// are classified from `gold` itself.
EvalReport per_property_report(std::span<const std::vector<std::string>> predictions,
                               std::span<const data::Instance> gold, std::span<const data::PropertyStats> stats);

/// Columns: Method, Mean F1, Bound, Categorical, Relational, Date.
std::string summary_tsv(std::span<const EvalReport> reports);
/// Columns: Section, Property, Frequency, Instances, Mean F1.
std::string property_tsv(const EvalReport& report);
std::string report_json(const EvalReport& report);

/// Columns: property, frequency, scaled_entropy, class.
std::string stats_tsv(std::span<const data::PropertyStats> stats);

}  // namespace wikireading::eval
