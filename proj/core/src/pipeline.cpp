#include "evstud/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "evstud/errors.hpp"
#include "evstud/parallel.hpp"

namespace evstud {

std::string_view to_string(EstimatorKind k) {
  switch (k) {
    case EstimatorKind::Ols: return "ols";
    case EstimatorKind::OlsLimited: return "ols_limited";
    case EstimatorKind::Sur: return "sur";
  }
  return "unknown";
}

EstimatorKind parse_estimator(std::string_view s) {
  if (s == "ols") return EstimatorKind::Ols;
  if (s == "ols_limited") return EstimatorKind::OlsLimited;
  if (s == "sur") return EstimatorKind::Sur;
  throw Error(ErrorCode::ConfigError, "unknown estimator '" + std::string(s) + "'");
}

BenchmarkModel parse_benchmark(std::string_view s) {
  if (s == "ff3") return BenchmarkModel::FF3;
  if (s == "zero") return BenchmarkModel::Zero;
  throw Error(ErrorCode::ConfigError, "unknown benchmark '" + std::string(s) + "'");
}

void RunSettings::validate() const {
  if (dummy_window.pre_days < car_window.pre_days ||
      dummy_window.post_days < car_window.post_days)
    throw Error(ErrorCode::ConfigError, "dummy window must contain the CAR window");
  if (car_window.pre_days < 0 || car_window.post_days < 0)
    throw Error(ErrorCode::ConfigError, "window days must be nonnegative");
  if (dummy_window.length() > 11)
    throw Error(ErrorCode::ConfigError, "dummy window exceeds the 11-day maximum");
  if (threads < 1)
    throw Error(ErrorCode::ConfigError, "threads must be >= 1");
}

namespace {

std::vector<ArEstimate> fit_all_firms(const ReturnPanel& panel,
                                      const FactorSeries& factors,
                                      const std::vector<ResolvedEvent>& events,
                                      const EventWindow& window, BenchmarkModel model,
                                      const RegressionConfig& reg, int threads) {
  std::vector<ArEstimate> estimates(panel.firm_ids.size());
  parallel_for(panel.firm_ids.size(), threads, [&](std::size_t i) {
    DesignMatrix d =
        build_design(panel.firm_ids[i], panel, factors, events, window, model, reg);
    estimates[i] = fit_ols(d, reg);
  });
  return estimates;
}

}  // namespace

EstimationOutput run_estimation(const ReturnPanel& panel, const FactorSeries& factors,
                                const std::vector<EventRecord>& events,
                                const RunSettings& settings) {
  settings.validate();
  panel.validate();
  factors.validate();

  EstimationOutput out;
  out.filter_result = apply_sample_filters(events, panel, settings.filters);
  if (out.filter_result.kept.empty())
    throw Error(ErrorCode::InsufficientData, "no events pass the sample filters");

  if (settings.estimator == EstimatorKind::Ols) {
    out.scored_events = resolve_events(out.filter_result.kept, panel.calendar);
    out.estimates = fit_all_firms(panel, factors, out.scored_events,
                                  settings.dummy_window, settings.benchmark,
                                  settings.regression, settings.threads);
    ResidualCorrelation corr = residual_correlation(
        out.estimates, CorrelationMode::Pairwise, settings.regression.min_overlap);
    out.r_bar = corr.mean_offdiag;
    double mean_days = 0.0;
    for (const auto& est : out.estimates)
      mean_days += static_cast<double>(est.residual_days.size()) +
                   static_cast<double>(est.ar_by_event_day.size());
    out.days_in_sample =
        static_cast<int>(std::lround(mean_days / static_cast<double>(out.estimates.size())));
  } else {
    LimitedSample limited = build_limited_sample(
        panel, out.filter_result.kept, settings.limited_start, settings.limited_end);
    out.scored_events = resolve_events(limited.events, limited.panel.calendar);
    out.days_in_sample = static_cast<int>(limited.panel.calendar.size());

    RegressionConfig reg = settings.regression;
    reg.require_balanced = true;

    if (settings.estimator == EstimatorKind::OlsLimited) {
      out.estimates = fit_all_firms(limited.panel, factors, out.scored_events,
                                    settings.dummy_window, settings.benchmark, reg,
                                    settings.threads);
      ResidualCorrelation corr = residual_correlation(
          out.estimates, CorrelationMode::Balanced, reg.min_overlap);
      out.r_bar = corr.mean_offdiag;
    } else {
      SurSystem system = assemble_system(limited.panel, factors, out.scored_events,
                                         settings.dummy_window, settings.benchmark, reg);
      SurEstimate sur = fit_sur(system, settings.iterate_sur);
      out.estimates = std::move(sur.firm_estimates);
      if (settings.r_bar_source == RBarSource::Ols) {
        std::vector<ArEstimate> ols = fit_all_firms(limited.panel, factors,
                                                    out.scored_events,
                                                    settings.dummy_window,
                                                    settings.benchmark, reg,
                                                    settings.threads);
        out.r_bar = residual_correlation(ols, CorrelationMode::Balanced,
                                         reg.min_overlap)
                        .mean_offdiag;
      } else {
        out.r_bar = residual_correlation(out.estimates, CorrelationMode::Balanced,
                                         reg.min_overlap)
                        .mean_offdiag;
      }
    }
  }

  out.report = stat_report(out.estimates, out.scored_events, out.r_bar,
                           settings.car_window, out.days_in_sample);
  return out;
}

}  // namespace evstud
