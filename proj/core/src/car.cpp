#include "evstud/car.hpp"

#include <algorithm>
#include <cmath>

#include "evstud/errors.hpp"

namespace evstud {

CarTable build_car_table(const std::vector<ArEstimate>& estimates,
                         const std::vector<ResolvedEvent>& events,
                         const EventWindow& window) {
  std::map<std::string, const ArEstimate*> by_firm;
  for (const auto& est : estimates) by_firm[est.firm_id] = &est;

  CarTable table;
  table.window = window;
  table.rows.reserve(events.size());
  for (const auto& ev : events) {
    auto it = by_firm.find(ev.record.firm_id);
    if (it == by_firm.end())
      throw Error(ErrorCode::ContractError,
                  "no estimate for firm " + ev.record.firm_id + " of event " +
                      ev.record.event_id);
    CarRow row;
    row.event_id = ev.record.event_id;
    row.firm_id = ev.record.firm_id;
    row.date = ev.record.event_date;
    row.incident_type = ev.record.incident_type;
    row.sector = ev.record.sector;
    row.news_source = ev.record.news_source;
    row.market_cap_usd = ev.record.market_cap_usd;
    for (int off = -window.pre_days; off <= window.post_days; ++off) {
      auto ar = it->second->ar_by_event_day.find({ev.record.event_id, off});
      if (ar == it->second->ar_by_event_day.end())
        throw Error(ErrorCode::ContractError,
                    "event " + ev.record.event_id + " is missing window offset " +
                        std::to_string(off));
      row.per_offset_ar[off] = ar->second;
      row.car += ar->second;
    }
    if (row.market_cap_usd) row.loss_usd = row.car * *row.market_cap_usd;
    table.rows.push_back(std::move(row));
  }
  return table;
}

void join_characteristics(CarTable& table,
                          const std::vector<FirmCharacteristics>& characteristics) {
  std::map<std::string, std::vector<const FirmCharacteristics*>> by_firm;
  for (const auto& c : characteristics) by_firm[c.firm_id].push_back(&c);
  for (auto& [firm, rows] : by_firm)
    std::sort(rows.begin(), rows.end(),
              [](const FirmCharacteristics* a, const FirmCharacteristics* b) {
                return a->asof_date < b->asof_date;
              });

  for (CarRow& row : table.rows) {
    auto it = by_firm.find(row.firm_id);
    if (it == by_firm.end()) continue;
    const FirmCharacteristics* best = nullptr;
    for (const auto* c : it->second) {
      if (c->asof_date <= row.date)
        best = c;
      else if (!best)
        best = c;  // nothing at or before the event: take the first later one
    }
    if (best) row.characteristics = *best;
  }
}

AarCurve aar_caar(const std::vector<ArEstimate>& estimates,
                  const std::vector<ResolvedEvent>& events,
                  const EventWindow& curve_window) {
  std::map<std::string, const ArEstimate*> by_firm;
  for (const auto& est : estimates) by_firm[est.firm_id] = &est;

  AarCurve curve;
  if (events.empty())
    throw Error(ErrorCode::InsufficientData, "no events for AAR curve");
  for (int off = -curve_window.pre_days; off <= curve_window.post_days; ++off) {
    double sum = 0.0;
    for (const auto& ev : events) {
      auto fit = by_firm.find(ev.record.firm_id);
      if (fit == by_firm.end())
        throw Error(ErrorCode::ContractError,
                    "no estimate for firm " + ev.record.firm_id);
      auto ar = fit->second->ar_by_event_day.find({ev.record.event_id, off});
      if (ar == fit->second->ar_by_event_day.end())
        throw Error(ErrorCode::ContractError,
                    "event " + ev.record.event_id + " lacks offset " +
                        std::to_string(off) +
                        "; estimate with a dummy span covering the curve window");
      sum += ar->second;
    }
    curve.offsets.push_back(off);
    curve.aar.push_back(sum / static_cast<double>(events.size()));
    curve.caar.push_back((curve.caar.empty() ? 0.0 : curve.caar.back()) +
                         curve.aar.back());
  }
  return curve;
}

LossSummary loss_summary(const CarTable& table,
                         const std::function<bool(const CarRow&)>& filter) {
  std::vector<double> losses;
  for (const CarRow& row : table.rows)
    if (row.loss_usd && (!filter || filter(row))) losses.push_back(*row.loss_usd);
  if (losses.empty())
    throw Error(ErrorCode::EmptySelection, "no rows with losses pass the filter");

  std::sort(losses.begin(), losses.end());
  LossSummary out;
  out.n = static_cast<int>(losses.size());
  for (double v : losses) out.total_usd += v;
  out.mean_usd = out.total_usd / static_cast<double>(losses.size());
  const std::size_t mid = losses.size() / 2;
  out.median_usd = losses.size() % 2 == 1
                       ? losses[mid]
                       : 0.5 * (losses[mid - 1] + losses[mid]);
  return out;
}

}  // namespace evstud
