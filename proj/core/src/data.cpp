#include "evstud/data.hpp"

#include <array>
#include <cmath>
#include <utility>

#include "evstud/errors.hpp"

namespace evstud {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError: return "parse_error";
    case ErrorCode::CoverageError: return "coverage_error";
    case ErrorCode::ValidationError: return "validation_error";
    case ErrorCode::ConfigError: return "config_error";
    case ErrorCode::ContractError: return "contract_error";
    case ErrorCode::SingularDesign: return "singular_design";
    case ErrorCode::DegenerateStatistic: return "degenerate_statistic";
    case ErrorCode::InvalidCorrelation: return "invalid_correlation";
    case ErrorCode::InsufficientData: return "insufficient_data";
    case ErrorCode::CollinearDesign: return "collinear_design";
    case ErrorCode::EmptySelection: return "empty_selection";
    case ErrorCode::NumericalError: return "numerical_error";
  }
  return "unknown_error";
}

int error_exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::SingularDesign:
    case ErrorCode::NumericalError:
      return 3;
    default:
      return 2;
  }
}

std::optional<std::size_t> ReturnPanel::firm_index(std::string_view id) const {
  for (std::size_t i = 0; i < firm_ids.size(); ++i)
    if (firm_ids[i] == id) return i;
  return std::nullopt;
}

void ReturnPanel::validate() const {
  if (static_cast<std::size_t>(excess_returns.rows()) != firm_ids.size() ||
      static_cast<std::size_t>(excess_returns.cols()) != calendar.size())
    throw Error(ErrorCode::ContractError,
                "return panel dimensions do not match firm_ids x calendar");
  for (Eigen::Index i = 0; i < excess_returns.rows(); ++i)
    for (Eigen::Index j = 0; j < excess_returns.cols(); ++j) {
      double v = excess_returns(i, j);
      if (std::isfinite(v) && v <= -1.0)
        throw Error(ErrorCode::ValidationError,
                    "excess return <= -1.0 for firm " + firm_ids[i] + " on " +
                        to_string(calendar[j]));
    }
}

void FactorSeries::validate() const {
  const auto n = static_cast<Eigen::Index>(calendar.size());
  for (const auto* v : {&mkt_excess, &smb, &hml, &rf}) {
    if (v->size() != n)
      throw Error(ErrorCode::ContractError, "factor series length mismatch");
    if (!v->allFinite())
      throw Error(ErrorCode::CoverageError, "factor series contains missing values");
  }
}

namespace {

template <typename E, std::size_t N>
E parse_enum(std::string_view s, const std::array<std::pair<std::string_view, E>, N>& table,
             std::string_view what) {
  for (const auto& [name, value] : table)
    if (name == s) return value;
  throw Error(ErrorCode::ParseError,
              "unknown " + std::string(what) + " '" + std::string(s) + "'");
}

constexpr std::array<std::pair<std::string_view, IncidentType>, kIncidentTypeCount>
    kIncidentTypes{{
        {"DataBreach", IncidentType::DataBreach},
        {"SoftwareBreach", IncidentType::SoftwareBreach},
        {"CyberBreach", IncidentType::CyberBreach},
        {"SocialBreach", IncidentType::SocialBreach},
        {"Ransomware", IncidentType::Ransomware},
        {"Shutdown", IncidentType::Shutdown},
        {"TwitterBreach", IncidentType::TwitterBreach},
        {"FacebookBreach", IncidentType::FacebookBreach},
        {"StolenFunds", IncidentType::StolenFunds},
        {"Mitigation", IncidentType::Mitigation},
        {"Other", IncidentType::Other},
    }};

constexpr std::array<std::pair<std::string_view, Sector>, kSectorCount> kSectors{{
    {"Technology", Sector::Technology},
    {"ConsumerProducts", Sector::ConsumerProducts},
    {"Financials", Sector::Financials},
    {"Healthcare", Sector::Healthcare},
    {"Industrials", Sector::Industrials},
    {"Other", Sector::Other},
}};

constexpr std::array<std::pair<std::string_view, NewsSource>, kNewsSourceCount>
    kNewsSources{{
        {"Reuters", NewsSource::Reuters},
        {"Twitter", NewsSource::Twitter},
        {"Other", NewsSource::Other},
    }};

}  // namespace

IncidentType parse_incident_type(std::string_view s) {
  return parse_enum(s, kIncidentTypes, "incident_type");
}
Sector parse_sector(std::string_view s) { return parse_enum(s, kSectors, "sector"); }
NewsSource parse_news_source(std::string_view s) {
  return parse_enum(s, kNewsSources, "news_source");
}

std::string_view to_string(IncidentType t) {
  return kIncidentTypes[static_cast<std::size_t>(t)].first;
}
std::string_view to_string(Sector s) {
  return kSectors[static_cast<std::size_t>(s)].first;
}
std::string_view to_string(NewsSource s) {
  return kNewsSources[static_cast<std::size_t>(s)].first;
}

std::string_view to_string(BenchmarkModel m) {
  return m == BenchmarkModel::FF3 ? "ff3" : "zero";
}

}  // namespace evstud
