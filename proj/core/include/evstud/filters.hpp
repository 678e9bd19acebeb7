#pragma once

#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "evstud/data.hpp"

namespace evstud {

struct ResolvedDay {
  std::size_t index = 0;
  bool shifted = false;
  int shift_days = 0;
};

/// Maps an event date onto the calendar. Dates that are not trading days shift
/// forward to the next trading day; dates past the calendar end are errors.
ResolvedDay resolve_event_day(const Date& event_date, const TradingCalendar& calendar);

struct SampleFilterConfig {
  double cap_floor_usd = 3.0e8;
  std::optional<Date> range_start;
  std::optional<Date> range_end;
  /// Maximum number of calendar slots the shift plus the event window may span.
  int max_window_days = 5;
  int max_shift_days = 1;
  EventWindow window{};
};

enum class DropReason {
  CapFloor,
  NoReturnOnEventDay,
  WindowTooLong,
  OutOfRange,
  ShiftTooFar,
};

std::string_view to_string(DropReason r);

struct FilterResult {
  std::vector<EventRecord> kept;
  std::vector<std::pair<EventRecord, DropReason>> dropped;
};

/// Total partition of the input into kept and dropped (with reasons).
FilterResult apply_sample_filters(const std::vector<EventRecord>& events,
                                  const ReturnPanel& panel,
                                  const SampleFilterConfig& config);

struct LimitedSample {
  ReturnPanel panel;
  std::vector<EventRecord> events;
};

/// Balanced sub-panel over [range_start, range_end]: firms with any missing day
/// in range are excluded; events are those of retained firms inside the range.
LimitedSample build_limited_sample(const ReturnPanel& panel,
                                   const std::vector<EventRecord>& events,
                                   const Date& range_start, const Date& range_end);

}  // namespace evstud
