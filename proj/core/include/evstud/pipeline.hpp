#pragma once

#include <optional>

#include "evstud/car.hpp"
#include "evstud/filters.hpp"
#include "evstud/stats.hpp"
#include "evstud/sur.hpp"

namespace evstud {

enum class EstimatorKind { Ols, OlsLimited, Sur };

std::string_view to_string(EstimatorKind k);
EstimatorKind parse_estimator(std::string_view s);
BenchmarkModel parse_benchmark(std::string_view s);

enum class RBarSource { EstimatorUnderTest, Ols };

struct RunSettings {
  BenchmarkModel benchmark = BenchmarkModel::FF3;
  EstimatorKind estimator = EstimatorKind::Ols;
  EventWindow car_window{1, 1};
  /// Dummy span of the single fit; must contain car_window. Widen it to get
  /// AAR/CAAR curves out of the same regression.
  EventWindow dummy_window{1, 1};
  SampleFilterConfig filters;
  RegressionConfig regression;
  Date limited_start{2013, 12, 19};
  Date limited_end{2022, 10, 13};
  bool iterate_sur = false;
  RBarSource r_bar_source = RBarSource::EstimatorUnderTest;
  int threads = 1;

  void validate() const;
};

struct EstimationOutput {
  std::vector<ArEstimate> estimates;
  std::vector<ResolvedEvent> scored_events;
  FilterResult filter_result;
  double r_bar = 0.0;
  int days_in_sample = 0;
  StatReport report;
};

/// Filter -> (limited-sample) -> per-firm OLS or SUR -> residual correlation
/// -> cross-sectional statistics. Per-firm fits run in parallel; outputs are
/// merged in firm order so results do not depend on the thread count.
EstimationOutput run_estimation(const ReturnPanel& panel, const FactorSeries& factors,
                                const std::vector<EventRecord>& events,
                                const RunSettings& settings);

}  // namespace evstud
