#include "wikireading/eval/report.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

#include <json.hpp>

#include "wikireading/data/dates.hpp"
#include "wikireading/eval/metrics.hpp"

namespace wikireading::eval {

namespace {

std::string fixed(double v, int digits = 3) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string fixed(const std::optional<double>& v) { return v ? fixed(*v) : "-"; }

nlohmann::json optional_json(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); }

}  // namespace

const char* to_string(Section section) {
  switch (section) {
    case Section::kCategorical: return "Categorical";
    case Section::kRelational: return "Relational";
    case Section::kDate: return "Date";
  }
  return "unknown";
}

const std::set<std::string, std::less<>>& date_property_names() {
  static const std::set<std::string, std::less<>> names = {
      "date of birth", "date of death", "publication date", "inception", "point in time", "start time",
      "end time",      "date of official opening", "dissolved or abolished", "first flight", "time of discovery"};
  return names;
}

EvalReport per_property_report(std::span<const std::vector<std::string>> predictions,
                               std::span<const data::Instance> gold, std::span<const data::PropertyStats> stats) {
  EvalReport report;
  report.instances = gold.size();
  report.mean_f1 = mean_f1(predictions, gold);

  struct Accumulator {
    std::vector<data::Instance> instances;
    double f1_sum = 0.0;
    std::size_t canonical_dates = 0;
  };
  std::map<std::string, Accumulator, std::less<>> by_property;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    auto& acc = by_property[gold[i].property];
    acc.instances.push_back(gold[i]);
    if (i < predictions.size()) acc.f1_sum += instance_f1(predictions[i], gold[i].answers);
    const bool all_dates = std::all_of(gold[i].answers.begin(), gold[i].answers.end(),
                                       [](const std::string& a) { return data::is_canonical_date(a); });
    if (all_dates) ++acc.canonical_dates;
  }

  std::map<std::string, const data::PropertyStats*, std::less<>> stats_by_name;
  for (const auto& s : stats) stats_by_name.emplace(s.property, &s);

  double section_sum[3] = {0, 0, 0};
  std::size_t section_count[3] = {0, 0, 0};
  for (const auto& [property, acc] : by_property) {
    PropertyRow row;
    row.property = property;
    row.instances = acc.instances.size();
    row.mean_f1 = acc.f1_sum / static_cast<double>(row.instances);
    const auto it = stats_by_name.find(property);
    data::PropertyClass cls;
    if (it != stats_by_name.end()) {
      row.frequency = it->second->frequency;
      cls = it->second->cls;
    } else {
      row.frequency = row.instances;
      cls = data::classify_property(data::answer_entropy(acc.instances));
    }
    const bool date = date_property_names().count(property) > 0 ||
                      static_cast<double>(acc.canonical_dates) > kDateAnswerShare * static_cast<double>(row.instances);
    row.section = date ? Section::kDate
                       : (cls == data::PropertyClass::kCategorical ? Section::kCategorical : Section::kRelational);
    const auto s = static_cast<std::size_t>(row.section);
    section_sum[s] += acc.f1_sum;
    section_count[s] += row.instances;
    report.rows.push_back(std::move(row));
  }
  std::stable_sort(report.rows.begin(), report.rows.end(), [](const PropertyRow& a, const PropertyRow& b) {
    if (a.section != b.section) return a.section < b.section;
    return a.frequency > b.frequency;
  });

  auto section_score = [&](Section s) -> std::optional<double> {
    const auto k = static_cast<std::size_t>(s);
    if (section_count[k] == 0) return std::nullopt;
    return section_sum[k] / static_cast<double>(section_count[k]);
  };
  report.categorical = section_score(Section::kCategorical);
  report.relational = section_score(Section::kRelational);
  report.date = section_score(Section::kDate);
  return report;
}

std::string summary_tsv(std::span<const EvalReport> reports) {
  std::string out = "Method\tMean F1\tBound\tCategorical\tRelational\tDate\n";
  for (const auto& r : reports) {
    out += r.method + "\t" + fixed(r.mean_f1) + "\t" + fixed(r.bound) + "\t" + fixed(r.categorical) + "\t" +
           fixed(r.relational) + "\t" + fixed(r.date) + "\n";
  }
  return out;
}

std::string property_tsv(const EvalReport& report) {
  std::string out = "Section\tProperty\tFrequency\tInstances\tMean F1\n";
  for (const auto& row : report.rows) {
    out += std::string(to_string(row.section)) + "\t" + row.property + "\t" + std::to_string(row.frequency) + "\t" +
           std::to_string(row.instances) + "\t" + fixed(row.mean_f1) + "\n";
  }
  return out;
}

std::string report_json(const EvalReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : report.rows) {
    rows.push_back({{"section", to_string(row.section)},
                    {"property", row.property},
                    {"frequency", row.frequency},
                    {"instances", row.instances},
                    {"mean_f1", row.mean_f1}});
  }
  nlohmann::json j = {{"method", report.method},
                      {"mean_f1", report.mean_f1},
                      {"bound", optional_json(report.bound)},
                      {"instances", report.instances},
                      {"categorical", optional_json(report.categorical)},
                      {"relational", optional_json(report.relational)},
                      {"date", optional_json(report.date)},
                      {"properties", rows}};
  return j.dump(2);
}

std::string stats_tsv(std::span<const data::PropertyStats> stats) {
  std::string out = "property\tfrequency\tscaled_entropy\tclass\n";
  for (const auto& s : stats) {
    out += s.property + "\t" + std::to_string(s.frequency) + "\t" + fixed(s.scaled_entropy, 4) + "\t" +
           data::to_string(s.cls) + "\n";
  }
  return out;
}

}  // namespace wikireading::eval
