#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace wikireading::data {

/// Malformed or unusable input data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One (document, property, answer set) task unit.
struct Instance {
  std::string document;
  std::string property;
  std::vector<std::string> answers;  // non-empty, exact-string unique
  std::optional<std::string> source_id;

  /// The value used as a single-answer training target: the
  /// lexicographically smallest member of the answer set.
  const std::string& training_answer() const;

  friend bool operator==(const Instance&, const Instance&) = default;
};

/// Builds an instance, dropping repeated answers (first occurrence wins).
/// Throws DataError when no answer is given.
Instance make_instance(std::string document, std::string property, std::vector<std::string> answers,
                       std::optional<std::string> source_id = std::nullopt);

// Instance files are UTF-8 newline-delimited JSON, one object per line:
//   {"document": "...", "property": "...", "answers": ["...", ...], "source_id": "..."}
// source_id is optional.

Instance instance_from_json(std::string_view line);
std::string instance_to_json(const Instance& instance);

std::vector<Instance> read_instances(const std::filesystem::path& path);
void write_instances(const std::filesystem::path& path, std::span<const Instance> instances);

}  // namespace wikireading::data
