#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "evstud/calendar.hpp"

namespace evstud {

/// Per-firm daily excess returns aligned to a trading calendar.
/// Missing observations are NaN; every finite entry must be > -1.
struct ReturnPanel {
  std::vector<std::string> firm_ids;
  TradingCalendar calendar;
  Eigen::MatrixXd excess_returns;  // firm x day

  std::optional<std::size_t> firm_index(std::string_view id) const;
  void validate() const;
};

/// Daily factor returns and risk-free rate, complete over the calendar.
struct FactorSeries {
  TradingCalendar calendar;
  Eigen::VectorXd mkt_excess;
  Eigen::VectorXd smb;
  Eigen::VectorXd hml;
  Eigen::VectorXd rf;

  void validate() const;
};

enum class IncidentType {
  DataBreach,
  SoftwareBreach,
  CyberBreach,
  SocialBreach,
  Ransomware,
  Shutdown,
  TwitterBreach,
  FacebookBreach,
  StolenFunds,
  Mitigation,
  Other,
};

enum class Sector {
  Technology,
  ConsumerProducts,
  Financials,
  Healthcare,
  Industrials,
  Other,
};

enum class NewsSource {
  Reuters,
  Twitter,
  Other,
};

IncidentType parse_incident_type(std::string_view s);
Sector parse_sector(std::string_view s);
NewsSource parse_news_source(std::string_view s);
std::string_view to_string(IncidentType t);
std::string_view to_string(Sector s);
std::string_view to_string(NewsSource s);

constexpr std::size_t kIncidentTypeCount = 11;
constexpr std::size_t kSectorCount = 6;
constexpr std::size_t kNewsSourceCount = 3;

struct EventRecord {
  std::string event_id;
  std::string firm_id;
  Date event_date;
  IncidentType incident_type = IncidentType::Other;
  Sector sector = Sector::Other;
  NewsSource news_source = NewsSource::Other;
  std::optional<double> market_cap_usd;
};

struct FirmCharacteristics {
  std::string firm_id;
  Date asof_date;
  std::optional<double> ln_size;
  std::optional<double> ln_age;
  std::optional<double> book_to_market;
  std::optional<double> price_to_earnings;
};

/// Symmetric event window: pre_days before through post_days after day 0.
struct EventWindow {
  int pre_days = 1;
  int post_days = 1;

  int length() const { return pre_days + post_days + 1; }
  bool operator==(const EventWindow&) const = default;
};

enum class BenchmarkModel { FF3, Zero };

std::string_view to_string(BenchmarkModel m);

}  // namespace evstud
