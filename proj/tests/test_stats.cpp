#include <doctest.h>

#include "evstud/errors.hpp"
#include "evstud/stats.hpp"
#include "test_support.hpp"

using namespace evstud;
using evstud::test::event_on;

namespace {

ArEstimate hand_estimate(const std::string& firm, double s_i,
                         std::map<EventDayKey, double> ars,
                         std::map<EventDayKey, double> leverage) {
  ArEstimate est;
  est.firm_id = firm;
  est.model = BenchmarkModel::FF3;
  est.s_i = s_i;
  est.dof = 100;
  est.ar_by_event_day = std::move(ars);
  est.leverage_by_event_day = std::move(leverage);
  est.residuals = Eigen::VectorXd::Zero(4);
  return est;
}

ResolvedEvent resolved(const std::string& event_id, const std::string& firm) {
  ResolvedEvent ev;
  ev.record = event_on(event_id, firm, Date{2020, 1, 2});
  return ev;
}

}  // namespace

TEST_CASE("pinned closed forms: scaled AR, ADJ-BMP and ADJ-PATELL") {
  // Single-day window, AR = 7, s_i = sqrt(2.5), leverage exactly 1.
  ArEstimate est = hand_estimate("F", std::sqrt(2.5), {{{"e", 0}, 7.0}},
                                 {{{"e", 0}, 1.0}});
  ScaledAr scaled = scale_ar(est, "e", EventWindow{0, 0});
  CHECK(scaled.a_values.size() == 1);
  CHECK(scaled.a_values[0] == doctest::Approx(3.1305).epsilon(1e-4 / 3.1305));
  CHECK(scaled.a_window == scaled.a_values[0]);

  Eigen::VectorXd a(4);
  a << 2, 1, 0, 1;
  CHECK(adj_bmp(a, 0.2) == doctest::Approx(1.73205).epsilon(1e-5));

  Eigen::VectorXd ones = Eigen::VectorXd::Ones(4);
  CHECK(adj_patell(ones, 0.0, 103, 3) == doctest::Approx(1.97970).epsilon(1e-5));
}

TEST_CASE("windowed scaling pools the per-day forecast variances") {
  ArEstimate est = hand_estimate(
      "F", 2.0,
      {{{"e", -1}, 1.0}, {{"e", 0}, 3.0}, {{"e", 1}, -2.0}},
      {{{"e", -1}, 1.0}, {{"e", 0}, 1.0}, {{"e", 1}, 1.0}});
  ScaledAr scaled = scale_ar(est, "e", EventWindow{1, 1});
  REQUIRE(scaled.a_values.size() == 3);
  CHECK(scaled.a_values[0] == doctest::Approx(1.0 / (2.0 * std::sqrt(2.0))));
  double expected = (1.0 + 3.0 - 2.0) / (2.0 * std::sqrt(6.0));
  CHECK(scaled.a_window == doctest::Approx(expected).epsilon(1e-14));

  ArEstimate degenerate = est;
  degenerate.s_i = 0.0;
  CHECK_THROWS_AS(scale_ar(degenerate, "e", EventWindow{1, 1}), Error);
  CHECK_THROWS_AS(scale_ar(est, "missing", EventWindow{1, 1}), Error);
}

TEST_CASE("sar_variance applies the Kolari-Pynnonen inflation") {
  Eigen::VectorXd a(3);
  a << 1.0, 2.0, 3.0;
  auto [s2, sA2] = sar_variance(a, 0.5);
  CHECK(s2 == doctest::Approx(1.0));
  CHECK(sA2 == doctest::Approx(2.0));
  CHECK_THROWS_AS(sar_variance(a, 1.0), Error);
  Eigen::VectorXd tiny(1);
  tiny << 1.0;
  CHECK_THROWS_AS(sar_variance(tiny, 0.0), Error);
}

TEST_CASE("unadjusted_t is the plain cross-sectional t") {
  Eigen::VectorXd cars(4);
  cars << 0.02, -0.01, 0.03, 0.02;
  double mean = cars.mean();
  double sd = std::sqrt((cars.array() - mean).square().sum() / 3.0);
  CHECK(unadjusted_t(cars) == doctest::Approx(mean * 2.0 / sd).epsilon(1e-14));
  CHECK_THROWS_AS(unadjusted_t(Eigen::VectorXd::Ones(3)), Error);
}

TEST_CASE("adjusted statistics degrade gracefully on bad r_bar") {
  Eigen::VectorXd a(4);
  a << 2, 1, 0, 1;
  CHECK_THROWS_AS(adj_bmp(a, 1.0), Error);
  CHECK_THROWS_AS(adj_bmp(a, -0.5), Error);  // deflator 1 + 3(-0.5) < 0
  CHECK_THROWS_AS(adj_patell(a, 0.0, 5, 3), Error);  // m too small
}

TEST_CASE("stat_report aggregates events per firm before the adjusted tests") {
  // Two firms; firm A has two events, firm B one. Window (0,0), leverage 1.
  std::vector<ArEstimate> estimates{
      hand_estimate("A", 1.0, {{{"a1", 0}, 2.0}, {{"a2", 0}, 4.0}},
                    {{{"a1", 0}, 1.0}, {{"a2", 0}, 1.0}}),
      hand_estimate("B", 2.0, {{{"b1", 0}, 6.0}}, {{{"b1", 0}, 1.0}}),
  };
  std::vector<ResolvedEvent> events{resolved("a1", "A"), resolved("a2", "A"),
                                    resolved("b1", "B")};
  StatReport report = stat_report(estimates, events, 0.1, EventWindow{0, 0}, 250);

  CHECK(report.n == 3);
  CHECK(report.n_firms == 2);
  CHECK(report.m == 250);
  CHECK(report.p == 3);
  CHECK(report.mean_car == doctest::Approx((2.0 + 4.0 + 6.0) / 3.0).epsilon(1e-14));

  // Firm aggregates pool every event-day forecast variance: firm A has two
  // window days with 1 + h = 2, so A = (2+4)/(1*sqrt(4)) = 3; firm B has one,
  // B = 6/(2*sqrt(2)).
  Eigen::VectorXd firm_scaled(2);
  firm_scaled << 3.0, 6.0 / (2.0 * std::sqrt(2.0));
  auto [s2, sA2] = sar_variance(firm_scaled, 0.1);
  CHECK(report.s2 == doctest::Approx(s2).epsilon(1e-14));
  CHECK(report.sA2 == doctest::Approx(sA2).epsilon(1e-14));
  CHECK(report.t_adj_bmp ==
        doctest::Approx(adj_bmp(firm_scaled, 0.1)).epsilon(1e-14));
  CHECK(report.t_adj_patell ==
        doctest::Approx(adj_patell(firm_scaled, 0.1, 250, 3)).epsilon(1e-14));

  Eigen::VectorXd cars(3);
  cars << 2.0, 4.0, 6.0;
  CHECK(report.t_unadjusted == doctest::Approx(unadjusted_t(cars)).epsilon(1e-14));
}

TEST_CASE("stat_report rejects unscorable inputs") {
  std::vector<ArEstimate> estimates{
      hand_estimate("A", 1.0, {{{"a1", 0}, 2.0}}, {{{"a1", 0}, 1.0}})};
  CHECK_THROWS_AS(stat_report(estimates, {}, 0.0, EventWindow{0, 0}, 250), Error);
  // Single firm: no cross-section for the adjusted statistics.
  CHECK_THROWS_AS(
      stat_report(estimates, {resolved("a1", "A")}, 0.0, EventWindow{0, 0}, 250),
      Error);
  // Unknown firm.
  CHECK_THROWS_AS(
      stat_report(estimates, {resolved("x", "NOPE")}, 0.0, EventWindow{0, 0}, 250),
      Error);
}
