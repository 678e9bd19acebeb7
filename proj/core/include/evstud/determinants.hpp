#pragma once

#include <string>
#include <utility>
#include <vector>

#include "evstud/car.hpp"

namespace evstud {

/// Cross-sectional regression of CARs (in percent) on named columns.
/// Recognized column names:
///   "year:<YYYY>"        event-year dummy
///   "type:<IncidentType>" incident-type dummy
///   "type_other"         1 for every non-DataBreach incident
///   "sector:<Sector>"    sector dummy
///   "source:<NewsSource>" news-source dummy
///   "ln_size" "ln_age" "btm" "pe"   firm characteristics (missing drops row)
struct PanelSpec {
  std::vector<std::string> regressors;
  bool include_constant = false;
  std::vector<std::pair<std::string, std::string>> interactions;
};

struct PanelResult {
  struct Coefficient {
    std::string name;
    double estimate = 0.0;
    double t_stat = 0.0;
  };
  std::vector<Coefficient> coefficients;
  int n_obs = 0;
  double r_squared = 0.0;  // centered with a constant, uncentered otherwise
  int dropped_rows = 0;    // rows with missing covariates
  std::vector<std::string> warnings;
};

PanelResult run_panel(const CarTable& table, const PanelSpec& spec,
                      bool robust_hc1 = false);

/// Incident-year dummies, no constant; years without events are omitted with a
/// warning (collected into the spec builder's warnings list).
PanelSpec build_spec_years(const CarTable& table, std::vector<std::string>* warnings = nullptr);

/// Model 1: incident-type dummies only. Model 2: data-breach dummy, an
/// all-other-types dummy, the five named sector dummies, and data-breach x
/// sector interactions.
PanelSpec build_spec_type_sector(const CarTable& table, int model,
                                 std::vector<std::string>* warnings = nullptr);

/// Constant plus ln_size, ln_age, book-to-market and price-to-earnings. With
/// drop_empty_columns, covariates missing in every row are dropped with a
/// warning instead of erroring.
PanelSpec build_spec_characteristics(const CarTable& table,
                                     bool drop_empty_columns = false,
                                     std::vector<std::string>* warnings = nullptr);

/// News-source dummies, no constant.
PanelSpec build_spec_source(const CarTable& table,
                            std::vector<std::string>* warnings = nullptr);

}  // namespace evstud
