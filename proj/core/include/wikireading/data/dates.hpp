#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wikireading::data {

struct Date {
  int year = 1;
  int month = 1;
  int day = 1;

  friend bool operator==(const Date&, const Date&) = default;
};

bool is_valid_date(const Date& date);

/// "<day> <MonthName> <year>" without zero padding, e.g. "4 July 1776".
/// Throws std::invalid_argument for dates outside the Gregorian calendar
/// (years start at 1).
std::string format_timestamp(const Date& date);

/// Month number (1-12) for an English month name, case-sensitive.
std::optional<int> month_from_name(std::string_view name);

/// A date recognised in a token sequence, covering tokens [begin, end).
struct DateMatch {
  std::size_t begin = 0;
  std::size_t end = 0;
  Date date;
};

/// Tries the supported surface patterns at `pos`:
///   D Month YYYY | Month D YYYY | Month D , YYYY | YYYY - MM - DD
std::optional<DateMatch> match_date_at(std::span<const std::string> tokens, std::size_t pos);

/// Non-overlapping dates found left to right.
std::vector<DateMatch> find_dates(std::span<const std::string> tokens);

/// Parses a string whose tokens form exactly one date in a supported pattern.
std::optional<Date> parse_date(std::string_view text);

/// True if `text` is a date in the canonical "<d> <Month> <yyyy>" format.
bool is_canonical_date(std::string_view text);

}  // namespace wikireading::data
