#pragma once

#include <filesystem>
#include <utility>
#include <vector>

#include "evstud/data.hpp"

namespace evstud {

/// Loads returns.csv (date,firm_id,ret) and factors.csv (date,mkt_rf,smb,hml,rf).
/// The panel calendar is the set of dates with at least one return; every one of
/// those dates must have a factor row. Returns become excess returns (ret - rf).
std::pair<ReturnPanel, FactorSeries> load_panel(const std::filesystem::path& returns_csv,
                                                const std::filesystem::path& factors_csv);

/// events.csv: event_id,firm_id,date,incident_type,sector,news_source,market_cap_usd
/// Unknown sector values map to Other with a warning.
std::vector<EventRecord> load_events(const std::filesystem::path& events_csv,
                                     std::vector<std::string>* warnings = nullptr);

/// characteristics.csv: firm_id,asof_date,ln_size,ln_age,btm,pe (empty = missing)
std::vector<FirmCharacteristics> load_characteristics(
    const std::filesystem::path& characteristics_csv);

}  // namespace evstud
