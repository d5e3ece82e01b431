#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace wikireading::cli {

enum ExitCode : int { kSuccess = 0, kUsage = 1, kData = 2, kDivergence = 3 };

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Settings = std::vector<std::pair<std::string, std::string>>;

/// "key = value" lines; blank lines and lines starting with '#' are skipped.
Settings parse_settings(std::string_view text);
Settings read_settings(const std::filesystem::path& path);

/// `error: code=N kind=K message="..."`, with quotes and backslashes escaped.
std::string error_line(int code, std::string_view kind, std::string_view message);

/// Runs one command line. Results go to `out`; the error line goes to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace wikireading::cli
