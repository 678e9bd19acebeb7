#include "evstud/calendar.hpp"

#include <algorithm>
#include <charconv>

#include "evstud/errors.hpp"

namespace evstud {

Date parse_date(std::string_view text) {
  auto fail = [&] {
    throw Error(ErrorCode::ParseError,
                "malformed date '" + std::string(text) + "', expected YYYY-MM-DD");
  };
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') fail();
  Date d;
  auto parse_int = [&](std::string_view part, int& out) {
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), out);
    if (ec != std::errc{} || ptr != part.data() + part.size()) fail();
  };
  parse_int(text.substr(0, 4), d.year);
  parse_int(text.substr(5, 2), d.month);
  parse_int(text.substr(8, 2), d.day);
  if (d.month < 1 || d.month > 12 || d.day < 1 || d.day > 31) fail();
  // Reject impossible dates such as Feb 29 in a non-leap year: a valid date
  // round-trips through the civil-day conversion unchanged.
  if (civil_from_days(days_from_civil(d)) != d) fail();
  return d;
}

std::string to_string(const Date& d) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", d.year, d.month, d.day);
  return buf;
}

// Howard Hinnant's civil-day algorithms.
std::int64_t days_from_civil(const Date& d) {
  std::int64_t y = d.year;
  y -= d.month <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * (d.month + (d.month > 2 ? -3 : 9)) + 2) / 5 + d.day - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

Date civil_from_days(std::int64_t z) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned day = doy - (153 * mp + 2) / 5 + 1;
  const unsigned month = mp + (mp < 10 ? 3 : -9);
  return Date{static_cast<int>(y + (month <= 2)), static_cast<int>(month),
              static_cast<int>(day)};
}

int weekday(const Date& d) {
  std::int64_t z = days_from_civil(d);
  return static_cast<int>(((z % 7) + 10) % 7);  // 1970-01-01 was a Thursday
}

Date add_days(const Date& d, int n) { return civil_from_days(days_from_civil(d) + n); }

TradingCalendar::TradingCalendar(std::vector<Date> days) : days_(std::move(days)) {
  if (days_.empty())
    throw Error(ErrorCode::ValidationError, "trading calendar must be non-empty");
  for (std::size_t i = 1; i < days_.size(); ++i) {
    if (!(days_[i - 1] < days_[i]))
      throw Error(ErrorCode::ValidationError,
                  "trading calendar must be strictly increasing at " +
                      to_string(days_[i]));
  }
}

std::optional<std::size_t> TradingCalendar::index_of(const Date& d) const {
  auto it = std::lower_bound(days_.begin(), days_.end(), d);
  if (it == days_.end() || *it != d) return std::nullopt;
  return static_cast<std::size_t>(it - days_.begin());
}

std::optional<std::size_t> TradingCalendar::index_on_or_after(const Date& d) const {
  auto it = std::lower_bound(days_.begin(), days_.end(), d);
  if (it == days_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - days_.begin());
}

TradingCalendar TradingCalendar::intersect(const TradingCalendar& other) const {
  std::vector<Date> out;
  std::set_intersection(days_.begin(), days_.end(), other.days_.begin(),
                        other.days_.end(), std::back_inserter(out));
  if (out.empty())
    throw Error(ErrorCode::CoverageError, "calendar intersection is empty");
  return TradingCalendar(std::move(out));
}

TradingCalendar TradingCalendar::slice(const Date& from, const Date& to) const {
  auto lo = std::lower_bound(days_.begin(), days_.end(), from);
  auto hi = std::upper_bound(days_.begin(), days_.end(), to);
  if (lo >= hi)
    throw Error(ErrorCode::ConfigError, "date range " + to_string(from) + ".." +
                                            to_string(to) +
                                            " contains no trading days");
  return TradingCalendar(std::vector<Date>(lo, hi));
}

TradingCalendar make_weekday_calendar(const Date& start, std::size_t n_days) {
  std::vector<Date> days;
  days.reserve(n_days);
  Date d = start;
  while (days.size() < n_days) {
    if (weekday(d) < 5) days.push_back(d);
    d = add_days(d, 1);
  }
  return TradingCalendar(std::move(days));
}

}  // namespace evstud
