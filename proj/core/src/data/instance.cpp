#include "wikireading/data/instance.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>

namespace wikireading::data {

using nlohmann::json;

const std::string& Instance::training_answer() const {
  if (answers.empty()) throw DataError("instance has no answers");
  return *std::min_element(answers.begin(), answers.end());
}

Instance make_instance(std::string document, std::string property, std::vector<std::string> answers,
                       std::optional<std::string> source_id) {
  if (answers.empty()) throw DataError("instance must have at least one answer");
  std::vector<std::string> unique;
  for (auto& a : answers) {
    if (std::find(unique.begin(), unique.end(), a) == unique.end()) unique.push_back(std::move(a));
  }
  return Instance{std::move(document), std::move(property), std::move(unique), std::move(source_id)};
}

Instance instance_from_json(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw DataError("instance line is not a JSON object");
  auto field = [&](const char* key) -> std::string {
    auto it = j.find(key);
    if (it == j.end() || !it->is_string()) throw DataError(std::string("missing string field '") + key + "'");
    return it->get<std::string>();
  };
  auto answers_it = j.find("answers");
  if (answers_it == j.end() || !answers_it->is_array()) throw DataError("missing array field 'answers'");
  std::vector<std::string> answers;
  for (const auto& a : *answers_it) {
    if (!a.is_string()) throw DataError("answers must be strings");
    answers.push_back(a.get<std::string>());
  }
  std::optional<std::string> source_id;
  if (auto it = j.find("source_id"); it != j.end() && it->is_string()) source_id = it->get<std::string>();
  return make_instance(field("document"), field("property"), std::move(answers), std::move(source_id));
}

std::string instance_to_json(const Instance& instance) {
  json j;
  j["document"] = instance.document;
  j["property"] = instance.property;
  j["answers"] = instance.answers;
  if (instance.source_id) j["source_id"] = *instance.source_id;
  return j.dump();
}

std::vector<Instance> read_instances(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open instance file " + path.string());
  std::vector<Instance> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(instance_from_json(line));
    } catch (const DataError& e) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

void write_instances(const std::filesystem::path& path, std::span<const Instance> instances) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  for (const auto& instance : instances) out << instance_to_json(instance) << '\n';
}

}  // namespace wikireading::data
