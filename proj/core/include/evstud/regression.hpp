#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "evstud/data.hpp"
#include "evstud/filters.hpp"

namespace evstud {

struct RegressionConfig {
  int min_obs = 100;
  double condition_bound = 1e10;
  int min_overlap = 60;
  /// Limited variant: every calendar day must have a return.
  bool require_balanced = false;
};

struct ResolvedEvent {
  EventRecord record;
  std::size_t day_index = 0;
  bool shifted = false;
  int shift_days = 0;
};

std::vector<ResolvedEvent> resolve_events(const std::vector<EventRecord>& events,
                                          const TradingCalendar& calendar);

/// One dummy column per (event, window offset) pair on top of the benchmark
/// regressors. Rows are the firm's non-missing days (all days when balanced).
struct DesignMatrix {
  std::string firm_id;
  BenchmarkModel model = BenchmarkModel::FF3;
  std::vector<std::size_t> row_days;  // day indices into the panel calendar
  std::vector<std::string> column_names;
  Eigen::MatrixXd values;
  Eigen::VectorXd response;  // firm excess returns on row_days

  struct Dummy {
    std::string event_id;
    int offset = 0;
    std::size_t column = 0;
    std::size_t row = 0;
  };
  std::vector<Dummy> dummies;
  std::size_t base_columns = 0;  // columns before the dummy block
};

DesignMatrix build_design(const std::string& firm_id, const ReturnPanel& panel,
                          const FactorSeries& factors,
                          const std::vector<ResolvedEvent>& events,
                          const EventWindow& window, BenchmarkModel model,
                          const RegressionConfig& config = {});

using EventDayKey = std::pair<std::string, int>;  // (event_id, window offset)

struct ArEstimate {
  std::string firm_id;
  BenchmarkModel model = BenchmarkModel::FF3;
  double alpha = 0.0;
  std::map<std::string, double> betas;  // Mkt / SMB / HML (empty for Zero)
  std::map<EventDayKey, double> ar_by_event_day;
  Eigen::VectorXd residuals;               // over non-dummy rows
  std::vector<std::size_t> residual_days;  // day indices of those rows
  double s_i = 0.0;
  int dof = 0;
  Eigen::MatrixXd xtx_inverse;  // full design, dummies included
  std::map<EventDayKey, double> leverage_by_event_day;
};

/// OLS via the dummy-coefficient identity: benchmark coefficients are fit on
/// non-dummy rows, each dummy coefficient is the realized-minus-predicted
/// return of its row, so dummy-row residuals are identically zero.
/// dof subtracts all columns, dummies included.
ArEstimate fit_ols(const DesignMatrix& design, const Eigen::VectorXd& returns,
                   const RegressionConfig& config = {});
ArEstimate fit_ols(const DesignMatrix& design, const RegressionConfig& config = {});

/// Two-step oracle: estimate the benchmark excluding event-window rows, then
/// return realized minus predicted on those rows. Test-side counterpart of the
/// dummy estimator; keep it independent of fit_ols.
std::map<EventDayKey, double> two_step_abnormal_returns(
    const std::string& firm_id, const ReturnPanel& panel, const FactorSeries& factors,
    const std::vector<ResolvedEvent>& events, const EventWindow& window,
    BenchmarkModel model, const RegressionConfig& config = {});

enum class CorrelationMode { Pairwise, Balanced };

struct ResidualCorrelation {
  Eigen::MatrixXd matrix;
  double mean_offdiag = 0.0;  // average of the strictly upper triangle
};

ResidualCorrelation residual_correlation(const std::vector<ArEstimate>& estimates,
                                         CorrelationMode mode, int min_overlap = 60);

}  // namespace evstud
