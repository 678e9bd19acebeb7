#include <doctest.h>

#include <random>

#include "evstud/determinants.hpp"
#include "evstud/errors.hpp"
#include "test_support.hpp"

using namespace evstud;

namespace {

CarRow make_row(const std::string& id, double car_decimal, int year,
                IncidentType type = IncidentType::DataBreach,
                Sector sector = Sector::Technology,
                NewsSource source = NewsSource::Reuters) {
  CarRow row;
  row.event_id = id;
  row.firm_id = "F_" + id;
  row.date = Date{year, 6, 15};
  row.car = car_decimal;
  row.incident_type = type;
  row.sector = sector;
  row.news_source = source;
  return row;
}

CarTable synthetic_table(std::uint64_t seed, int n_rows) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 0.03);
  CarTable table;
  table.window = EventWindow{1, 1};
  for (int i = 0; i < n_rows; ++i) {
    CarRow row = make_row("e" + std::to_string(i), gauss(rng), 2015 + i % 5,
                          static_cast<IncidentType>(i % kIncidentTypeCount),
                          static_cast<Sector>(i % kSectorCount),
                          static_cast<NewsSource>(i % kNewsSourceCount));
    FirmCharacteristics c;
    c.firm_id = row.firm_id;
    c.asof_date = row.date;
    c.ln_size = 20.0 + 0.1 * static_cast<double>(i % 13);
    c.ln_age = 1.0 + 0.2 * static_cast<double>(i % 7);
    c.book_to_market = 0.3 + 0.05 * static_cast<double>(i % 9);
    if (i % 6 != 0) c.price_to_earnings = 10.0 + static_cast<double>(i % 11);
    row.characteristics = c;
    table.rows.push_back(std::move(row));
  }
  return table;
}

const PanelResult::Coefficient& coef(const PanelResult& r, const std::string& name) {
  for (const auto& c : r.coefficients)
    if (c.name == name) return c;
  throw std::runtime_error("missing coefficient " + name);
}

}  // namespace

TEST_CASE("dummy-only regressions reproduce per-group mean CARs") {
  CarTable table = synthetic_table(1, 60);

  SUBCASE("year dummies") {
    PanelSpec spec = build_spec_years(table);
    PanelResult result = run_panel(table, spec);
    for (const auto& c : result.coefficients) {
      int year = std::stoi(c.name.substr(5));
      double sum = 0.0;
      int n = 0;
      for (const auto& row : table.rows)
        if (row.date.year == year) {
          sum += row.car * 100.0;
          ++n;
        }
      REQUIRE(n > 0);
      CHECK(std::abs(c.estimate - sum / n) < 1e-12);
    }
  }
  SUBCASE("news-source dummies") {
    PanelSpec spec = build_spec_source(table);
    PanelResult result = run_panel(table, spec);
    REQUIRE(result.coefficients.size() == 3);
    for (const auto& c : result.coefficients) {
      double sum = 0.0;
      int n = 0;
      for (const auto& row : table.rows)
        if ("source:" + std::string(to_string(row.news_source)) == c.name) {
          sum += row.car * 100.0;
          ++n;
        }
      CHECK(std::abs(c.estimate - sum / n) < 1e-12);
    }
  }
  SUBCASE("incident-type dummies (model 1)") {
    PanelSpec spec = build_spec_type_sector(table, 1);
    PanelResult result = run_panel(table, spec);
    for (const auto& c : result.coefficients) {
      double sum = 0.0;
      int n = 0;
      for (const auto& row : table.rows)
        if ("type:" + std::string(to_string(row.incident_type)) == c.name) {
          sum += row.car * 100.0;
          ++n;
        }
      CHECK(std::abs(c.estimate - sum / n) < 1e-12);
    }
  }
}

TEST_CASE("t-stats and R-squared match a hand-computed OLS") {
  CarTable table = synthetic_table(2, 40);
  PanelSpec spec = build_spec_characteristics(table);
  PanelResult result = run_panel(table, spec);

  // Rebuild y and X for rows with complete covariates.
  std::vector<Eigen::VectorXd> rows;
  std::vector<double> ys;
  for (const auto& row : table.rows) {
    const auto& c = row.characteristics;
    if (!c->price_to_earnings) continue;
    Eigen::VectorXd x(5);
    x << 1.0, *c->ln_size, *c->ln_age, *c->book_to_market, *c->price_to_earnings;
    rows.push_back(x);
    ys.push_back(row.car * 100.0);
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd x(n, 5);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    x.row(i) = rows[static_cast<std::size_t>(i)];
    y(i) = ys[static_cast<std::size_t>(i)];
  }
  Eigen::VectorXd beta = (x.transpose() * x).ldlt().solve(x.transpose() * y);
  Eigen::VectorXd resid = y - x * beta;
  double sigma2 = resid.squaredNorm() / static_cast<double>(n - 5);
  Eigen::MatrixXd cov = sigma2 * (x.transpose() * x).inverse();

  CHECK(result.n_obs == static_cast<int>(n));
  CHECK(result.dropped_rows == 40 - static_cast<int>(n));
  REQUIRE(result.coefficients.size() == 5);
  for (Eigen::Index i = 0; i < 5; ++i) {
    CHECK(result.coefficients[static_cast<std::size_t>(i)].estimate ==
          doctest::Approx(beta(i)).epsilon(1e-8));
    CHECK(result.coefficients[static_cast<std::size_t>(i)].t_stat ==
          doctest::Approx(beta(i) / std::sqrt(cov(i, i))).epsilon(1e-6));
  }
  double tss = (y.array() - y.mean()).square().sum();
  CHECK(result.r_squared ==
        doctest::Approx(1.0 - resid.squaredNorm() / tss).epsilon(1e-10));
}

TEST_CASE("uncentered R-squared without a constant") {
  CarTable table = synthetic_table(3, 30);
  PanelSpec spec = build_spec_years(table);
  PanelResult result = run_panel(table, spec);
  CHECK(result.r_squared >= 0.0);
  CHECK(result.r_squared <= 1.0);
}

TEST_CASE("HC1 robust errors change t-stats but not coefficients") {
  CarTable table = synthetic_table(4, 50);
  PanelSpec spec = build_spec_characteristics(table);
  PanelResult plain = run_panel(table, spec, false);
  PanelResult robust = run_panel(table, spec, true);
  bool any_t_differs = false;
  for (std::size_t i = 0; i < plain.coefficients.size(); ++i) {
    CHECK(plain.coefficients[i].estimate == robust.coefficients[i].estimate);
    any_t_differs |= plain.coefficients[i].t_stat != robust.coefficients[i].t_stat;
  }
  CHECK(any_t_differs);
}

TEST_CASE("model 2 includes breach, sector and interaction terms") {
  CarTable table = synthetic_table(5, 66);
  std::vector<std::string> warnings;
  PanelSpec spec = build_spec_type_sector(table, 2, &warnings);
  CHECK(spec.regressors[0] == "type:DataBreach");
  CHECK(spec.regressors[1] == "type_other");
  CHECK(std::count_if(spec.regressors.begin(), spec.regressors.end(),
                      [](const std::string& r) {
                        return r.rfind("sector:", 0) == 0;
                      }) == 5);
  CHECK(!spec.interactions.empty());
  for (const auto& [a, b] : spec.interactions) CHECK(a == "type:DataBreach");

  PanelResult result = run_panel(table, spec);
  bool has_interaction = false;
  for (const auto& c : result.coefficients)
    has_interaction |= c.name.find(" * ") != std::string::npos;
  CHECK(has_interaction);
}

TEST_CASE("gap years are warned about and omitted") {
  CarTable table;
  table.window = EventWindow{1, 1};
  table.rows.push_back(make_row("a", 0.01, 2015));
  table.rows.push_back(make_row("b", -0.02, 2015));
  table.rows.push_back(make_row("c", 0.03, 2018));
  table.rows.push_back(make_row("d", 0.02, 2018));
  std::vector<std::string> warnings;
  PanelSpec spec = build_spec_years(table, &warnings);
  CHECK(spec.regressors == std::vector<std::string>{"year:2015", "year:2018"});
  CHECK(warnings.size() == 2);  // 2016 and 2017
}

TEST_CASE("collinear columns are named in the error") {
  CarTable table = synthetic_table(6, 30);
  PanelSpec spec;
  spec.regressors = {"type:DataBreach", "type_other"};
  spec.include_constant = true;  // constant = breach + other: exactly collinear
  try {
    run_panel(table, spec);
    FAIL("expected CollinearDesign");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CollinearDesign);
    CHECK(std::string(e.what()).find("collinear") != std::string::npos);
  }
}

TEST_CASE("characteristic specs enforce minimum rows and column drops") {
  CarTable table = synthetic_table(7, 30);
  for (auto& row : table.rows) row.characteristics->price_to_earnings.reset();
  std::vector<std::string> warnings;
  PanelSpec spec = build_spec_characteristics(table, /*drop_empty_columns=*/true,
                                              &warnings);
  CHECK(std::find(spec.regressors.begin(), spec.regressors.end(), "pe") ==
        spec.regressors.end());
  REQUIRE(warnings.size() == 1);

  // Without dropping, the all-missing column erases every row.
  PanelSpec strict = build_spec_characteristics(table, false);
  CHECK_THROWS_AS(run_panel(table, strict), Error);

  CarTable small = synthetic_table(8, 9);
  PanelSpec spec_small = build_spec_characteristics(small, true);
  CHECK_THROWS_AS(run_panel(small, spec_small), Error);  // < 10 usable rows
}

TEST_CASE("percent units: coefficients are 100x the decimal-CAR fit") {
  CarTable table = synthetic_table(9, 40);
  PanelSpec spec = build_spec_years(table);
  PanelResult result = run_panel(table, spec);
  CarTable scaled = table;
  for (auto& row : scaled.rows) row.car *= 2.0;
  PanelResult doubled = run_panel(scaled, spec);
  for (std::size_t i = 0; i < result.coefficients.size(); ++i)
    CHECK(doubled.coefficients[i].estimate ==
          doctest::Approx(2.0 * result.coefficients[i].estimate).epsilon(1e-12));
}
