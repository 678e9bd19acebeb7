#include "evstud/determinants.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

#include "evstud/errors.hpp"

namespace evstud {

namespace {

bool starts_with(const std::string& s, std::string_view prefix) {
  return s.size() >= prefix.size() && s.compare(0, prefix.size(), prefix) == 0;
}

std::optional<double> column_value(const CarRow& row, const std::string& name) {
  if (starts_with(name, "year:")) {
    int year = 0;
    std::from_chars(name.data() + 5, name.data() + name.size(), year);
    return row.date.year == year ? 1.0 : 0.0;
  }
  if (starts_with(name, "type:"))
    return to_string(row.incident_type) == name.substr(5) ? 1.0 : 0.0;
  if (name == "type_other")
    return row.incident_type != IncidentType::DataBreach ? 1.0 : 0.0;
  if (starts_with(name, "sector:"))
    return to_string(row.sector) == name.substr(7) ? 1.0 : 0.0;
  if (starts_with(name, "source:"))
    return to_string(row.news_source) == name.substr(7) ? 1.0 : 0.0;
  if (name == "ln_size")
    return row.characteristics ? row.characteristics->ln_size : std::nullopt;
  if (name == "ln_age")
    return row.characteristics ? row.characteristics->ln_age : std::nullopt;
  if (name == "btm")
    return row.characteristics ? row.characteristics->book_to_market : std::nullopt;
  if (name == "pe")
    return row.characteristics ? row.characteristics->price_to_earnings : std::nullopt;
  throw Error(ErrorCode::ConfigError, "unknown panel column '" + name + "'");
}

bool is_characteristic(const std::string& name) {
  return name == "ln_size" || name == "ln_age" || name == "btm" || name == "pe";
}

}  // namespace

PanelResult run_panel(const CarTable& table, const PanelSpec& spec, bool robust_hc1) {
  if (table.rows.empty())
    throw Error(ErrorCode::InsufficientData, "empty CAR table");
  if (spec.regressors.empty() && !spec.include_constant)
    throw Error(ErrorCode::ConfigError, "panel spec has no regressors");
  {
    std::set<std::string> seen(spec.regressors.begin(), spec.regressors.end());
    if (seen.size() != spec.regressors.size())
      throw Error(ErrorCode::ConfigError, "duplicate regressor names in panel spec");
  }

  std::vector<std::string> names;
  if (spec.include_constant) names.push_back("const");
  for (const auto& r : spec.regressors) names.push_back(r);
  for (const auto& [a, b] : spec.interactions) names.push_back(a + " * " + b);

  const auto k = static_cast<Eigen::Index>(names.size());
  std::vector<Eigen::VectorXd> kept_rows;
  std::vector<double> kept_y;
  int dropped = 0;
  bool has_characteristic = false;
  for (const auto& n : spec.regressors) has_characteristic |= is_characteristic(n);

  for (const CarRow& row : table.rows) {
    Eigen::VectorXd x(k);
    Eigen::Index c = 0;
    bool missing = false;
    if (spec.include_constant) x(c++) = 1.0;
    for (const auto& name : spec.regressors) {
      auto v = column_value(row, name);
      if (!v) {
        missing = true;
        break;
      }
      x(c++) = *v;
    }
    if (!missing)
      for (const auto& [a, b] : spec.interactions) {
        auto va = column_value(row, a);
        auto vb = column_value(row, b);
        if (!va || !vb) {
          missing = true;
          break;
        }
        x(c++) = *va * *vb;
      }
    if (missing) {
      ++dropped;
      continue;
    }
    kept_rows.push_back(std::move(x));
    kept_y.push_back(row.car * 100.0);  // tables report CARs in percent
  }

  const auto n = static_cast<Eigen::Index>(kept_rows.size());
  if (n <= k)
    throw Error(ErrorCode::InsufficientData,
                "only " + std::to_string(n) + " usable rows for " +
                    std::to_string(k) + " coefficients");
  if (has_characteristic && n < 10)
    throw Error(ErrorCode::InsufficientData,
                "fewer than 10 rows with complete firm characteristics");

  Eigen::MatrixXd x(n, k);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    x.row(i) = kept_rows[static_cast<std::size_t>(i)];
    y(i) = kept_y[static_cast<std::size_t>(i)];
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  if (qr.rank() < k) {
    auto perm = qr.colsPermutation().indices();
    std::string cols;
    for (Eigen::Index i = qr.rank(); i < k; ++i)
      cols += (cols.empty() ? "" : ", ") + names[static_cast<std::size_t>(perm(i))];
    throw Error(ErrorCode::CollinearDesign,
                "collinear panel columns: " + cols);
  }
  Eigen::VectorXd beta = qr.solve(y);
  Eigen::VectorXd resid = y - x * beta;

  Eigen::MatrixXd rinv =
      qr.matrixR().topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(
          Eigen::MatrixXd::Identity(k, k));
  Eigen::MatrixXd xtx_inv = qr.colsPermutation() * (rinv * rinv.transpose()) *
                            qr.colsPermutation().transpose();

  double ssr = resid.squaredNorm();
  Eigen::VectorXd se(k);
  if (robust_hc1) {
    Eigen::MatrixXd meat = x.transpose() * resid.array().square().matrix().asDiagonal() * x;
    Eigen::MatrixXd cov = xtx_inv * meat * xtx_inv *
                          (static_cast<double>(n) / static_cast<double>(n - k));
    se = cov.diagonal().cwiseSqrt();
  } else {
    double sigma2 = ssr / static_cast<double>(n - k);
    se = (sigma2 * xtx_inv.diagonal()).cwiseSqrt();
  }

  PanelResult result;
  result.n_obs = static_cast<int>(n);
  result.dropped_rows = dropped;
  for (Eigen::Index i = 0; i < k; ++i) {
    double t = se(i) > 0.0 ? beta(i) / se(i) : 0.0;
    result.coefficients.push_back({names[static_cast<std::size_t>(i)], beta(i), t});
  }
  double tss = spec.include_constant ? (y.array() - y.mean()).square().sum()
                                     : y.squaredNorm();
  result.r_squared = tss > 0.0 ? 1.0 - ssr / tss : 0.0;
  return result;
}

PanelSpec build_spec_years(const CarTable& table, std::vector<std::string>* warnings) {
  if (table.rows.empty())
    throw Error(ErrorCode::InsufficientData, "empty CAR table");
  std::set<int> years;
  for (const CarRow& row : table.rows) years.insert(row.date.year);
  PanelSpec spec;
  for (int year = *years.begin(); year <= *years.rbegin(); ++year) {
    if (years.count(year)) {
      spec.regressors.push_back("year:" + std::to_string(year));
    } else if (warnings) {
      warnings->push_back("year " + std::to_string(year) +
                          " has no events; dummy omitted");
    }
  }
  return spec;
}

PanelSpec build_spec_type_sector(const CarTable& table, int model,
                                 std::vector<std::string>* warnings) {
  if (table.rows.empty())
    throw Error(ErrorCode::InsufficientData, "empty CAR table");
  if (model != 1 && model != 2)
    throw Error(ErrorCode::ConfigError, "type/sector model must be 1 or 2");

  PanelSpec spec;
  if (model == 1) {
    std::set<std::string> present;
    for (const CarRow& row : table.rows)
      present.insert(std::string(to_string(row.incident_type)));
    for (std::size_t i = 0; i < kIncidentTypeCount; ++i) {
      auto name = std::string(to_string(static_cast<IncidentType>(i)));
      if (present.count(name)) spec.regressors.push_back("type:" + name);
    }
    return spec;
  }

  bool any_breach = false, any_other = false;
  std::set<Sector> sectors_present;
  std::set<Sector> breach_sectors;
  for (const CarRow& row : table.rows) {
    sectors_present.insert(row.sector);
    if (row.incident_type == IncidentType::DataBreach) {
      any_breach = true;
      breach_sectors.insert(row.sector);
    } else {
      any_other = true;
    }
  }
  if (any_breach) spec.regressors.push_back("type:DataBreach");
  if (any_other) spec.regressors.push_back("type_other");
  // Sector "Other" is the baseline; its events load on the type dummies.
  for (Sector s : {Sector::Technology, Sector::ConsumerProducts, Sector::Financials,
                   Sector::Healthcare, Sector::Industrials}) {
    if (sectors_present.count(s)) {
      spec.regressors.push_back("sector:" + std::string(to_string(s)));
      if (any_breach && breach_sectors.count(s))
        spec.interactions.emplace_back("type:DataBreach",
                                       "sector:" + std::string(to_string(s)));
    } else if (warnings) {
      warnings->push_back("sector " + std::string(to_string(s)) +
                          " has no events; dummy omitted");
    }
  }
  return spec;
}

PanelSpec build_spec_characteristics(const CarTable& table, bool drop_empty_columns,
                                     std::vector<std::string>* warnings) {
  if (table.rows.empty())
    throw Error(ErrorCode::InsufficientData, "empty CAR table");
  PanelSpec spec;
  spec.include_constant = true;
  for (const std::string& name : {std::string("ln_size"), std::string("ln_age"),
                                  std::string("btm"), std::string("pe")}) {
    if (drop_empty_columns) {
      bool any = false;
      for (const CarRow& row : table.rows)
        if (column_value(row, name)) {
          any = true;
          break;
        }
      if (!any) {
        if (warnings)
          warnings->push_back("covariate " + name +
                              " missing in every row; column dropped");
        continue;
      }
    }
    spec.regressors.push_back(name);
  }
  if (spec.regressors.empty())
    throw Error(ErrorCode::InsufficientData, "no usable firm characteristics");
  return spec;
}

PanelSpec build_spec_source(const CarTable& table, std::vector<std::string>* warnings) {
  if (table.rows.empty())
    throw Error(ErrorCode::InsufficientData, "empty CAR table");
  std::set<NewsSource> present;
  for (const CarRow& row : table.rows) present.insert(row.news_source);
  PanelSpec spec;
  for (NewsSource s : {NewsSource::Reuters, NewsSource::Twitter, NewsSource::Other}) {
    if (present.count(s))
      spec.regressors.push_back("source:" + std::string(to_string(s)));
    else if (warnings)
      warnings->push_back("news source " + std::string(to_string(s)) +
                          " has no events; dummy omitted");
  }
  if (spec.regressors.size() == 1 && warnings)
    warnings->push_back("only one news source present");
  return spec;
}

}  // namespace evstud
