#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "evstud/regression.hpp"

namespace evstud {

struct CarRow {
  std::string event_id;
  std::string firm_id;
  Date date;
  double car = 0.0;
  std::map<int, double> per_offset_ar;
  std::optional<double> loss_usd;  // car * market cap, absent without a cap
  IncidentType incident_type = IncidentType::Other;
  Sector sector = Sector::Other;
  NewsSource news_source = NewsSource::Other;
  std::optional<double> market_cap_usd;
  std::optional<FirmCharacteristics> characteristics;
};

struct CarTable {
  EventWindow window;
  std::vector<CarRow> rows;
};

CarTable build_car_table(const std::vector<ArEstimate>& estimates,
                         const std::vector<ResolvedEvent>& events,
                         const EventWindow& window);

/// Joins each row to the firm's characteristics record with the latest
/// asof_date at or before the event date (first later record as fallback).
void join_characteristics(CarTable& table,
                          const std::vector<FirmCharacteristics>& characteristics);

struct AarCurve {
  std::vector<int> offsets;
  std::vector<double> aar;
  std::vector<double> caar;  // prefix sum of aar
};

AarCurve aar_caar(const std::vector<ArEstimate>& estimates,
                  const std::vector<ResolvedEvent>& events,
                  const EventWindow& curve_window = EventWindow{5, 5});

struct LossSummary {
  double total_usd = 0.0;
  double mean_usd = 0.0;
  double median_usd = 0.0;
  int n = 0;
};

LossSummary loss_summary(const CarTable& table,
                         const std::function<bool(const CarRow&)>& filter);

}  // namespace evstud
