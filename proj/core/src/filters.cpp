#include "evstud/filters.hpp"

#include <cmath>

#include "evstud/errors.hpp"

namespace evstud {

ResolvedDay resolve_event_day(const Date& event_date, const TradingCalendar& calendar) {
  auto idx = calendar.index_on_or_after(event_date);
  if (!idx)
    throw Error(ErrorCode::ValidationError,
                "event date " + to_string(event_date) + " is after the last trading day " +
                    to_string(calendar.back()));
  ResolvedDay out;
  out.index = *idx;
  out.shifted = calendar[*idx] != event_date;
  out.shift_days = static_cast<int>(days_from_civil(calendar[*idx]) -
                                    days_from_civil(event_date));
  return out;
}

std::string_view to_string(DropReason r) {
  switch (r) {
    case DropReason::CapFloor: return "cap_floor";
    case DropReason::NoReturnOnEventDay: return "no_return_on_event_day";
    case DropReason::WindowTooLong: return "window_too_long";
    case DropReason::OutOfRange: return "out_of_range";
    case DropReason::ShiftTooFar: return "shift_too_far";
  }
  return "unknown";
}

FilterResult apply_sample_filters(const std::vector<EventRecord>& events,
                                  const ReturnPanel& panel,
                                  const SampleFilterConfig& config) {
  FilterResult out;
  for (const EventRecord& ev : events) {
    if (config.range_start && ev.event_date < *config.range_start) {
      out.dropped.emplace_back(ev, DropReason::OutOfRange);
      continue;
    }
    if (config.range_end && ev.event_date > *config.range_end) {
      out.dropped.emplace_back(ev, DropReason::OutOfRange);
      continue;
    }
    if (ev.market_cap_usd && *ev.market_cap_usd < config.cap_floor_usd) {
      out.dropped.emplace_back(ev, DropReason::CapFloor);
      continue;
    }
    std::optional<std::size_t> day;
    int shift_days = 0;
    auto after = panel.calendar.index_on_or_after(ev.event_date);
    if (after) {
      day = *after;
      shift_days = static_cast<int>(days_from_civil(panel.calendar[*after]) -
                                    days_from_civil(ev.event_date));
    }
    if (day && shift_days > config.max_shift_days) {
      out.dropped.emplace_back(ev, DropReason::ShiftTooFar);
      continue;
    }
    // shift_days trading-day slots plus the window itself
    if (day) {
      int resolved_shift_slots = 0;
      if (shift_days > 0) resolved_shift_slots = 1;
      if (resolved_shift_slots + config.window.length() > config.max_window_days) {
        out.dropped.emplace_back(ev, DropReason::WindowTooLong);
        continue;
      }
    }
    auto firm = panel.firm_index(ev.firm_id);
    bool has_return =
        day && firm &&
        std::isfinite(panel.excess_returns(static_cast<Eigen::Index>(*firm),
                                           static_cast<Eigen::Index>(*day)));
    if (!has_return) {
      out.dropped.emplace_back(ev, DropReason::NoReturnOnEventDay);
      continue;
    }
    out.kept.push_back(ev);
  }
  return out;
}

LimitedSample build_limited_sample(const ReturnPanel& panel,
                                   const std::vector<EventRecord>& events,
                                   const Date& range_start, const Date& range_end) {
  TradingCalendar sub = panel.calendar.slice(range_start, range_end);
  auto first = panel.calendar.index_of(sub.front());
  auto last = panel.calendar.index_of(sub.back());
  const auto lo = static_cast<Eigen::Index>(*first);
  const auto n_days = static_cast<Eigen::Index>(*last - *first + 1);

  std::vector<std::string> kept_firms;
  std::vector<Eigen::Index> kept_rows;
  for (std::size_t i = 0; i < panel.firm_ids.size(); ++i) {
    auto row = panel.excess_returns.row(static_cast<Eigen::Index>(i)).segment(lo, n_days);
    if (row.allFinite()) {
      kept_firms.push_back(panel.firm_ids[i]);
      kept_rows.push_back(static_cast<Eigen::Index>(i));
    }
  }
  if (kept_firms.empty())
    throw Error(ErrorCode::ConfigError,
                "no firm has complete returns over " + to_string(range_start) + ".." +
                    to_string(range_end));

  Eigen::MatrixXd sub_returns(static_cast<Eigen::Index>(kept_rows.size()), n_days);
  for (std::size_t i = 0; i < kept_rows.size(); ++i)
    sub_returns.row(static_cast<Eigen::Index>(i)) =
        panel.excess_returns.row(kept_rows[i]).segment(lo, n_days);

  std::vector<EventRecord> kept_events;
  for (const EventRecord& ev : events) {
    if (ev.event_date < range_start || ev.event_date > range_end) continue;
    for (const auto& firm : kept_firms)
      if (firm == ev.firm_id) {
        kept_events.push_back(ev);
        break;
      }
  }
  if (kept_events.empty())
    throw Error(ErrorCode::ConfigError,
                "date range contains no events of retained firms");

  return LimitedSample{ReturnPanel{std::move(kept_firms), std::move(sub),
                                   std::move(sub_returns)},
                       std::move(kept_events)};
}

}  // namespace evstud
