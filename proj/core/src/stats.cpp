#include "evstud/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "evstud/errors.hpp"

namespace evstud {

namespace {

double sample_variance(const Eigen::VectorXd& v) {
  const auto n = v.size();
  double mean = v.mean();
  return (v.array() - mean).square().sum() / static_cast<double>(n - 1);
}

}  // namespace

ScaledAr scale_ar(const ArEstimate& estimate, const std::string& event_id,
                  const EventWindow& window) {
  if (estimate.s_i <= 0.0)
    throw Error(ErrorCode::DegenerateStatistic,
                "degenerate fit for firm " + estimate.firm_id + ": s_i is zero");
  ScaledAr out;
  out.event_id = event_id;
  double car = 0.0;
  double variance_sum = 0.0;
  for (int off = -window.pre_days; off <= window.post_days; ++off) {
    auto ar_it = estimate.ar_by_event_day.find({event_id, off});
    auto h_it = estimate.leverage_by_event_day.find({event_id, off});
    if (ar_it == estimate.ar_by_event_day.end() ||
        h_it == estimate.leverage_by_event_day.end())
      throw Error(ErrorCode::ContractError,
                  "event " + event_id + " is missing window offset " +
                      std::to_string(off) + " in the estimate for firm " +
                      estimate.firm_id);
    out.window_offsets.push_back(off);
    out.a_values.push_back(ar_it->second /
                           (estimate.s_i * std::sqrt(1.0 + h_it->second)));
    car += ar_it->second;
    variance_sum += 1.0 + h_it->second;
  }
  out.a_window = car / (estimate.s_i * std::sqrt(variance_sum));
  return out;
}

std::pair<double, double> sar_variance(const Eigen::VectorXd& a_values, double r_bar) {
  if (a_values.size() < 2)
    throw Error(ErrorCode::InsufficientData,
                "scaled-AR variance needs at least 2 values");
  if (r_bar >= 1.0)
    throw Error(ErrorCode::InvalidCorrelation,
                "r_bar must be below 1, got " + std::to_string(r_bar));
  double s2 = sample_variance(a_values);
  return {s2, s2 / (1.0 - r_bar)};
}

double adj_bmp(const Eigen::VectorXd& a_values, double r_bar) {
  const auto n = a_values.size();
  auto [s2, sA2] = sar_variance(a_values, r_bar);
  if (sA2 <= 0.0)
    throw Error(ErrorCode::DegenerateStatistic,
                "degenerate cross-section: scaled-AR variance is zero");
  double deflator = 1.0 + (static_cast<double>(n) - 1.0) * r_bar;
  if (deflator <= 0.0)
    throw Error(ErrorCode::InvalidCorrelation,
                "1 + (n-1) r_bar is non-positive");
  return a_values.mean() * std::sqrt(static_cast<double>(n)) /
         (std::sqrt(sA2) * std::sqrt(deflator));
}

double adj_patell(const Eigen::VectorXd& a_values, double r_bar, int m, int p) {
  if (a_values.size() < 1)
    throw Error(ErrorCode::InsufficientData, "no scaled abnormal returns");
  if (m <= p + 3)
    throw Error(ErrorCode::InsufficientData,
                "days in sample m=" + std::to_string(m) +
                    " must exceed p+3=" + std::to_string(p + 3));
  if (r_bar >= 1.0)
    throw Error(ErrorCode::InvalidCorrelation,
                "r_bar must be below 1, got " + std::to_string(r_bar));
  const auto n = a_values.size();
  double deflator = 1.0 + (static_cast<double>(n) - 1.0) * r_bar;
  if (deflator <= 0.0)
    throw Error(ErrorCode::InvalidCorrelation,
                "1 + (n-1) r_bar is non-positive");
  double dof_factor = std::sqrt(static_cast<double>(m - p - 1) /
                                static_cast<double>(m - p - 3));
  return a_values.mean() * std::sqrt(static_cast<double>(n)) /
         (dof_factor * std::sqrt(deflator));
}

double unadjusted_t(const Eigen::VectorXd& cars) {
  if (cars.size() < 2)
    throw Error(ErrorCode::InsufficientData,
                "cross-sectional t needs at least 2 CARs");
  double sd = std::sqrt(sample_variance(cars));
  if (sd == 0.0)
    throw Error(ErrorCode::DegenerateStatistic,
                "degenerate cross-section: CARs have zero variance");
  return cars.mean() * std::sqrt(static_cast<double>(cars.size())) / sd;
}

StatReport stat_report(const std::vector<ArEstimate>& estimates,
                       const std::vector<ResolvedEvent>& events, double r_bar,
                       const EventWindow& window, int days_in_sample) {
  if (events.empty())
    throw Error(ErrorCode::InsufficientData, "no events to score");

  std::map<std::string, const ArEstimate*> by_firm;
  for (const auto& est : estimates) by_firm[est.firm_id] = &est;

  Eigen::VectorXd cars(static_cast<Eigen::Index>(events.size()));
  struct FirmAccum {
    double car_sum = 0.0;
    double variance_sum = 0.0;
    const ArEstimate* estimate = nullptr;
  };
  std::map<std::string, FirmAccum> firm_accum;

  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& ev = events[i].record;
    auto it = by_firm.find(ev.firm_id);
    if (it == by_firm.end())
      throw Error(ErrorCode::ContractError,
                  "no estimate for firm " + ev.firm_id + " of event " + ev.event_id);
    const ArEstimate& est = *it->second;
    if (est.s_i <= 0.0)
      throw Error(ErrorCode::DegenerateStatistic,
                  "degenerate fit for firm " + est.firm_id + ": s_i is zero");
    double car = 0.0;
    FirmAccum& acc = firm_accum[ev.firm_id];
    acc.estimate = &est;
    for (int off = -window.pre_days; off <= window.post_days; ++off) {
      auto ar_it = est.ar_by_event_day.find({ev.event_id, off});
      auto h_it = est.leverage_by_event_day.find({ev.event_id, off});
      if (ar_it == est.ar_by_event_day.end() ||
          h_it == est.leverage_by_event_day.end())
        throw Error(ErrorCode::ContractError,
                    "event " + ev.event_id + " not fully scored at offset " +
                        std::to_string(off));
      car += ar_it->second;
      acc.variance_sum += 1.0 + h_it->second;
    }
    acc.car_sum += car;
    cars(static_cast<Eigen::Index>(i)) = car;
  }

  Eigen::VectorXd firm_scaled(static_cast<Eigen::Index>(firm_accum.size()));
  Eigen::Index fi = 0;
  for (const auto& [firm, acc] : firm_accum)
    firm_scaled(fi++) =
        acc.car_sum / (acc.estimate->s_i * std::sqrt(acc.variance_sum));

  StatReport report;
  report.n = static_cast<int>(events.size());
  report.n_firms = static_cast<int>(firm_accum.size());
  report.mean_car = cars.mean();
  report.r_bar = r_bar;
  report.m = days_in_sample;
  report.p = estimates.front().model == BenchmarkModel::FF3 ? 3 : 0;
  if (report.n < 2 || report.n_firms < 2)
    throw Error(ErrorCode::InsufficientData,
                "cross-sectional statistics need at least 2 events on 2 firms");
  auto [s2, sA2] = sar_variance(firm_scaled, r_bar);
  report.s2 = s2;
  report.sA2 = sA2;
  report.t_unadjusted = unadjusted_t(cars);
  report.t_adj_bmp = adj_bmp(firm_scaled, r_bar);
  report.t_adj_patell = adj_patell(firm_scaled, r_bar, report.m, report.p);
  return report;
}

}  // namespace evstud
