#include <doctest.h>

#include "evstud/car.hpp"
#include "evstud/errors.hpp"
#include "test_support.hpp"

using namespace evstud;
using evstud::test::event_on;
using evstud::test::random_panel;

namespace {

struct Fitted {
  std::vector<ArEstimate> estimates;
  std::vector<ResolvedEvent> events;
};

Fitted fit_fixture(std::uint64_t seed, int n_firms = 3, int n_days = 200) {
  auto [panel, factors] = random_panel(n_firms, n_days, seed);
  std::vector<EventRecord> raw;
  for (int i = 0; i < n_firms; ++i) {
    EventRecord ev = event_on("e" + std::to_string(i), "F" + std::to_string(i),
                              panel.calendar[static_cast<std::size_t>(40 + 17 * i)],
                              (i + 1) * 1.0e9);
    ev.incident_type = static_cast<IncidentType>(i % kIncidentTypeCount);
    ev.sector = static_cast<Sector>(i % kSectorCount);
    ev.news_source = static_cast<NewsSource>(i % kNewsSourceCount);
    raw.push_back(ev);
  }
  Fitted out;
  out.events = resolve_events(raw, panel.calendar);
  RegressionConfig reg;
  reg.min_obs = 10;
  for (int i = 0; i < n_firms; ++i) {
    DesignMatrix d = build_design("F" + std::to_string(i), panel, factors, out.events,
                                  EventWindow{5, 5}, BenchmarkModel::FF3, reg);
    out.estimates.push_back(fit_ols(d, reg));
  }
  return out;
}

}  // namespace

TEST_CASE("CAR is exactly the sum of window ARs; loss is CAR times cap") {
  Fitted fx = fit_fixture(101);
  CarTable table = build_car_table(fx.estimates, fx.events, EventWindow{1, 1});
  REQUIRE(table.rows.size() == 3);
  for (const auto& row : table.rows) {
    double sum = 0.0;
    REQUIRE(row.per_offset_ar.size() == 3);
    for (const auto& [off, ar] : row.per_offset_ar) sum += ar;
    CHECK(row.car == sum);  // exact: same additions in the same order
    REQUIRE(row.loss_usd);
    CHECK(*row.loss_usd == row.car * *row.market_cap_usd);
  }
}

TEST_CASE("events without a market cap have no loss") {
  Fitted fx = fit_fixture(102);
  fx.events[0].record.market_cap_usd.reset();
  CarTable table = build_car_table(fx.estimates, fx.events, EventWindow{1, 1});
  CHECK(!table.rows[0].loss_usd);
  CHECK(table.rows[1].loss_usd);
}

TEST_CASE("CAAR endpoint equals the AAR sum exactly") {
  Fitted fx = fit_fixture(103);
  AarCurve curve = aar_caar(fx.estimates, fx.events, EventWindow{5, 5});
  REQUIRE(curve.offsets.size() == 11);
  CHECK(curve.offsets.front() == -5);
  CHECK(curve.offsets.back() == 5);
  double running = 0.0;
  for (std::size_t i = 0; i < curve.aar.size(); ++i) {
    running += curve.aar[i];
    CHECK(curve.caar[i] == running);  // exact prefix-sum identity
  }

  // Per-offset AAR is the plain mean of event ARs.
  for (std::size_t i = 0; i < curve.offsets.size(); ++i) {
    double sum = 0.0;
    for (std::size_t e = 0; e < fx.events.size(); ++e)
      sum += fx.estimates[e].ar_by_event_day.at(
          {fx.events[e].record.event_id, curve.offsets[i]});
    CHECK(curve.aar[i] == doctest::Approx(sum / 3.0).epsilon(1e-14));
  }

  // A curve window wider than the fitted dummy span is a contract error.
  CHECK_THROWS_AS(aar_caar(fx.estimates, fx.events, EventWindow{6, 6}), Error);
}

TEST_CASE("join_characteristics picks the latest record at or before the event") {
  Fitted fx = fit_fixture(104);
  CarTable table = build_car_table(fx.estimates, fx.events, EventWindow{1, 1});
  Date event_date = table.rows[0].date;

  FirmCharacteristics early{table.rows[0].firm_id, add_days(event_date, -100),
                            20.0, {}, {}, {}};
  FirmCharacteristics recent{table.rows[0].firm_id, add_days(event_date, -5),
                             21.0, {}, {}, {}};
  FirmCharacteristics later{table.rows[0].firm_id, add_days(event_date, 30),
                            22.0, {}, {}, {}};
  FirmCharacteristics only_later{table.rows[1].firm_id, add_days(event_date, 200),
                                 30.0, {}, {}, {}};

  join_characteristics(table, {later, early, recent, only_later});
  REQUIRE(table.rows[0].characteristics);
  CHECK(table.rows[0].characteristics->ln_size == 21.0);  // latest at-or-before
  REQUIRE(table.rows[1].characteristics);
  CHECK(table.rows[1].characteristics->ln_size == 30.0);  // fallback: first later
  CHECK(!table.rows[2].characteristics);
}

TEST_CASE("loss_summary filters, totals and takes the even/odd median") {
  CarTable table;
  table.window = EventWindow{1, 1};
  auto add_row = [&](const std::string& id, double loss, Sector sector) {
    CarRow row;
    row.event_id = id;
    row.firm_id = id;
    row.date = Date{2020, 1, 2};
    row.sector = sector;
    row.loss_usd = loss;
    table.rows.push_back(row);
  };
  add_row("a", -4.0e9, Sector::Technology);
  add_row("b", -1.0e9, Sector::Technology);
  add_row("c", 2.0e9, Sector::Financials);
  add_row("d", -3.0e9, Sector::Technology);

  LossSummary all = loss_summary(table, nullptr);
  CHECK(all.n == 4);
  CHECK(all.total_usd == doctest::Approx(-6.0e9));
  CHECK(all.mean_usd == doctest::Approx(-1.5e9));
  CHECK(all.median_usd == doctest::Approx(-2.0e9));  // average of -3e9 and -1e9

  LossSummary tech = loss_summary(
      table, [](const CarRow& row) { return row.sector == Sector::Technology; });
  CHECK(tech.n == 3);
  CHECK(tech.median_usd == doctest::Approx(-3.0e9));

  CHECK_THROWS_AS(
      loss_summary(table, [](const CarRow&) { return false; }), Error);
}
