#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace evstud {

struct Date {
  int year = 1970;
  int month = 1;
  int day = 1;

  auto operator<=>(const Date&) const = default;
};

/// Parses "YYYY-MM-DD"; throws ParseError on malformed input.
Date parse_date(std::string_view text);
std::string to_string(const Date& d);

/// Days since 1970-01-01 (proleptic Gregorian).
std::int64_t days_from_civil(const Date& d);
Date civil_from_days(std::int64_t z);

/// 0 = Monday .. 6 = Sunday.
int weekday(const Date& d);
Date add_days(const Date& d, int n);

/// Strictly increasing, unique, non-empty sequence of trading days.
class TradingCalendar {
 public:
  explicit TradingCalendar(std::vector<Date> days);

  std::size_t size() const { return days_.size(); }
  const Date& operator[](std::size_t i) const { return days_[i]; }
  const Date& front() const { return days_.front(); }
  const Date& back() const { return days_.back(); }
  const std::vector<Date>& days() const { return days_; }

  std::optional<std::size_t> index_of(const Date& d) const;
  /// First trading day >= d, or nullopt when d is past the calendar end.
  std::optional<std::size_t> index_on_or_after(const Date& d) const;

  TradingCalendar intersect(const TradingCalendar& other) const;
  /// Sub-calendar restricted to [from, to]; ConfigError when empty.
  TradingCalendar slice(const Date& from, const Date& to) const;

  bool operator==(const TradingCalendar&) const = default;

 private:
  std::vector<Date> days_;
};

/// n consecutive weekdays starting at the first weekday >= start.
TradingCalendar make_weekday_calendar(const Date& start, std::size_t n_days);

}  // namespace evstud
