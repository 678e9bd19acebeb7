#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "evstud/regression.hpp"

namespace evstud {

/// Patell-scaled abnormal returns for one event.
struct ScaledAr {
  std::string event_id;
  std::vector<int> window_offsets;
  std::vector<double> a_values;  // per-offset AR / (s_i * sqrt(1 + h_t))
  double a_window = 0.0;         // sum(AR) / (s_i * sqrt(sum(1 + h_t)))
};

ScaledAr scale_ar(const ArEstimate& estimate, const std::string& event_id,
                  const EventWindow& window);

/// (s2, sA2) with s2 the unbiased sample variance and sA2 = s2 / (1 - r_bar).
std::pair<double, double> sar_variance(const Eigen::VectorXd& a_values, double r_bar);

double adj_bmp(const Eigen::VectorXd& a_values, double r_bar);

double adj_patell(const Eigen::VectorXd& a_values, double r_bar, int m, int p);

/// Cross-sectional t on raw CARs.
double unadjusted_t(const Eigen::VectorXd& cars);

struct StatReport {
  double mean_car = 0.0;  // decimal, not percent
  int n = 0;              // event count
  int n_firms = 0;        // firms with events; cross-sectional unit of the
                          // adjusted statistics
  double r_bar = 0.0;
  double s2 = 0.0;
  double sA2 = 0.0;
  double t_unadjusted = 0.0;
  double t_adj_patell = 0.0;
  double t_adj_bmp = 0.0;
  int m = 0;  // days in sample
  int p = 0;  // benchmark regressors excluding constant and dummies
};

/// The adjusted statistics aggregate each firm's event windows into one scaled
/// value, so their cross-sectional unit is the firm; the mean CAR and the
/// unadjusted t stay per-event.
StatReport stat_report(const std::vector<ArEstimate>& estimates,
                       const std::vector<ResolvedEvent>& events, double r_bar,
                       const EventWindow& window, int days_in_sample);

}  // namespace evstud
