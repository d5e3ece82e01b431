#include "wikireading/data/dates.hpp"

#include <array>
#include <charconv>
#include <stdexcept>

#include "wikireading/data/tokenizer.hpp"

namespace wikireading::data {

namespace {

constexpr std::array<std::string_view, 12> kMonths = {"January", "February", "March",     "April",
                                                      "May",     "June",     "July",      "August",
                                                      "September", "October", "November", "December"};

std::optional<int> parse_int(std::string_view s, std::size_t min_digits, std::size_t max_digits) {
  if (s.size() < min_digits || s.size() > max_digits) return std::nullopt;
  int value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

int days_in_month(int year, int month) {
  static constexpr std::array<int, 12> kDays = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  const bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
  return month == 2 && leap ? 29 : kDays[static_cast<std::size_t>(month - 1)];
}

std::optional<DateMatch> make_match(std::size_t begin, std::size_t end, int y, int m, int d) {
  Date date{y, m, d};
  if (!is_valid_date(date)) return std::nullopt;
  return DateMatch{begin, end, date};
}

}  // namespace

bool is_valid_date(const Date& date) {
  if (date.year < 1 || date.month < 1 || date.month > 12 || date.day < 1) return false;
  return date.day <= days_in_month(date.year, date.month);
}

std::string format_timestamp(const Date& date) {
  if (!is_valid_date(date)) {
    throw std::invalid_argument("invalid date " + std::to_string(date.year) + "-" + std::to_string(date.month) + "-" +
                                std::to_string(date.day));
  }
  return std::to_string(date.day) + " " + std::string(kMonths[static_cast<std::size_t>(date.month - 1)]) + " " +
         std::to_string(date.year);
}

std::optional<int> month_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kMonths.size(); ++i) {
    if (kMonths[i] == name) return static_cast<int>(i + 1);
  }
  return std::nullopt;
}

std::optional<DateMatch> match_date_at(std::span<const std::string> tokens, std::size_t pos) {
  const std::size_t left = pos < tokens.size() ? tokens.size() - pos : 0;
  auto tok = [&](std::size_t k) -> std::string_view { return tokens[pos + k]; };

  // YYYY - MM - DD
  if (left >= 5 && tok(1) == "-" && tok(3) == "-") {
    auto y = parse_int(tok(0), 4, 4), m = parse_int(tok(2), 1, 2), d = parse_int(tok(4), 1, 2);
    if (y && m && d) {
      if (auto match = make_match(pos, pos + 5, *y, *m, *d)) return match;
    }
  }
  if (left >= 3) {
    // D Month YYYY
    if (auto d = parse_int(tok(0), 1, 2)) {
      auto m = month_from_name(tok(1));
      auto y = parse_int(tok(2), 1, 4);
      if (m && y) {
        if (auto match = make_match(pos, pos + 3, *y, *m, *d)) return match;
      }
    }
    if (auto m = month_from_name(tok(0))) {
      if (auto d = parse_int(tok(1), 1, 2)) {
        // Month D , YYYY
        if (left >= 4 && tok(2) == ",") {
          if (auto y = parse_int(tok(3), 1, 4)) {
            if (auto match = make_match(pos, pos + 4, *y, *m, *d)) return match;
          }
        }
        // Month D YYYY
        if (auto y = parse_int(tok(2), 1, 4)) {
          if (auto match = make_match(pos, pos + 3, *y, *m, *d)) return match;
        }
      }
    }
  }
  return std::nullopt;
}

std::vector<DateMatch> find_dates(std::span<const std::string> tokens) {
  std::vector<DateMatch> out;
  std::size_t pos = 0;
  while (pos < tokens.size()) {
    if (auto m = match_date_at(tokens, pos)) {
      out.push_back(*m);
      pos = m->end;
    } else {
      ++pos;
    }
  }
  return out;
}

std::optional<Date> parse_date(std::string_view text) {
  const auto tokens = tokenize(text);
  auto m = match_date_at(tokens, 0);
  if (!m || m->end != tokens.size()) return std::nullopt;
  return m->date;
}

bool is_canonical_date(std::string_view text) {
  auto d = parse_date(text);
  return d && format_timestamp(*d) == text;
}

}  // namespace wikireading::data
