#include "evstud/regression.hpp"

#include <algorithm>
#include <cmath>

#include "evstud/errors.hpp"

namespace evstud {

namespace {

struct QrSolve {
  Eigen::VectorXd beta;
  Eigen::MatrixXd xtx_inverse;
};

/// Rank-revealing solve with a condition-number gate on the R diagonal.
QrSolve solve_checked(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                      double condition_bound, const std::string& what) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  const auto k = x.cols();
  if (qr.rank() < k)
    throw Error(ErrorCode::SingularDesign, what + ": design matrix is rank deficient",
                "rank=" + std::to_string(qr.rank()) + " cols=" + std::to_string(k));
  Eigen::VectorXd rdiag = qr.matrixR().diagonal().head(k).cwiseAbs();
  double cond = rdiag.maxCoeff() / rdiag.minCoeff();
  if (cond > condition_bound)
    throw Error(ErrorCode::SingularDesign,
                what + ": design matrix condition number exceeds bound",
                "cond=" + std::to_string(cond));
  QrSolve out;
  out.beta = qr.solve(y);
  Eigen::MatrixXd rinv =
      qr.matrixR().topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(
          Eigen::MatrixXd::Identity(k, k));
  out.xtx_inverse = qr.colsPermutation() * (rinv * rinv.transpose()) *
                    qr.colsPermutation().transpose();
  return out;
}

std::vector<ResolvedEvent> firm_events_sorted(const std::vector<ResolvedEvent>& events,
                                              const std::string& firm_id) {
  std::vector<ResolvedEvent> out;
  for (const auto& ev : events)
    if (ev.record.firm_id == firm_id) out.push_back(ev);
  std::sort(out.begin(), out.end(), [](const ResolvedEvent& a, const ResolvedEvent& b) {
    if (a.day_index != b.day_index) return a.day_index < b.day_index;
    return a.record.event_id < b.record.event_id;
  });
  return out;
}

void check_window_overlap(const std::vector<ResolvedEvent>& sorted,
                          const EventWindow& window, std::size_t n_days) {
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    auto d = static_cast<long>(sorted[i].day_index);
    if (d - window.pre_days < 0 ||
        d + window.post_days >= static_cast<long>(n_days))
      throw Error(ErrorCode::ValidationError,
                  "event " + sorted[i].record.event_id +
                      " window extends past the calendar edge");
    if (i > 0) {
      auto prev_end = static_cast<long>(sorted[i - 1].day_index) + window.post_days;
      if (d - window.pre_days <= prev_end)
        throw Error(ErrorCode::ValidationError,
                    "overlapping event windows for firm " + sorted[i].record.firm_id +
                        ": " + sorted[i - 1].record.event_id + " and " +
                        sorted[i].record.event_id);
    }
  }
}

}  // namespace

std::vector<ResolvedEvent> resolve_events(const std::vector<EventRecord>& events,
                                          const TradingCalendar& calendar) {
  std::vector<ResolvedEvent> out;
  out.reserve(events.size());
  for (const EventRecord& ev : events) {
    ResolvedDay d = resolve_event_day(ev.event_date, calendar);
    out.push_back(ResolvedEvent{ev, d.index, d.shifted, d.shift_days});
  }
  return out;
}

DesignMatrix build_design(const std::string& firm_id, const ReturnPanel& panel,
                          const FactorSeries& factors,
                          const std::vector<ResolvedEvent>& events,
                          const EventWindow& window, BenchmarkModel model,
                          const RegressionConfig& config) {
  auto firm = panel.firm_index(firm_id);
  if (!firm)
    throw Error(ErrorCode::ValidationError, "unknown firm " + firm_id);
  const auto fi = static_cast<Eigen::Index>(*firm);
  const std::size_t n_days = panel.calendar.size();

  DesignMatrix d;
  d.firm_id = firm_id;
  d.model = model;
  for (std::size_t t = 0; t < n_days; ++t) {
    double r = panel.excess_returns(fi, static_cast<Eigen::Index>(t));
    if (std::isfinite(r)) {
      d.row_days.push_back(t);
    } else if (config.require_balanced) {
      throw Error(ErrorCode::ContractError,
                  "firm " + firm_id + " has a missing return on " +
                      to_string(panel.calendar[t]) + " in the balanced variant");
    }
  }
  if (static_cast<int>(d.row_days.size()) < config.min_obs)
    throw Error(ErrorCode::InsufficientData,
                "firm " + firm_id + " has " + std::to_string(d.row_days.size()) +
                    " observations, need " + std::to_string(config.min_obs));

  auto firm_events = firm_events_sorted(events, firm_id);
  check_window_overlap(firm_events, window, n_days);

  d.base_columns = model == BenchmarkModel::FF3 ? 4 : 1;
  const std::size_t n_cols =
      d.base_columns + firm_events.size() * static_cast<std::size_t>(window.length());
  const auto n_rows = static_cast<Eigen::Index>(d.row_days.size());

  d.values = Eigen::MatrixXd::Zero(n_rows, static_cast<Eigen::Index>(n_cols));
  d.response.resize(n_rows);
  d.column_names.push_back("const");
  if (model == BenchmarkModel::FF3) {
    d.column_names.push_back("mkt_excess");
    d.column_names.push_back("smb");
    d.column_names.push_back("hml");
  }
  for (Eigen::Index r = 0; r < n_rows; ++r) {
    auto t = static_cast<Eigen::Index>(d.row_days[static_cast<std::size_t>(r)]);
    d.values(r, 0) = 1.0;
    if (model == BenchmarkModel::FF3) {
      d.values(r, 1) = factors.mkt_excess(t);
      d.values(r, 2) = factors.smb(t);
      d.values(r, 3) = factors.hml(t);
    }
    d.response(r) = panel.excess_returns(fi, t);
  }

  std::size_t col = d.base_columns;
  for (const auto& ev : firm_events) {
    for (int off = -window.pre_days; off <= window.post_days; ++off, ++col) {
      auto day = static_cast<std::size_t>(static_cast<long>(ev.day_index) + off);
      auto it = std::lower_bound(d.row_days.begin(), d.row_days.end(), day);
      if (it == d.row_days.end() || *it != day)
        throw Error(ErrorCode::ValidationError,
                    "event " + ev.record.event_id + " window day offset " +
                        std::to_string(off) + " has no return for firm " + firm_id);
      auto row = static_cast<std::size_t>(it - d.row_days.begin());
      d.values(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) = 1.0;
      d.column_names.push_back("ev:" + ev.record.event_id + ":" + std::to_string(off));
      d.dummies.push_back(DesignMatrix::Dummy{ev.record.event_id, off, col, row});
    }
  }
  return d;
}

ArEstimate fit_ols(const DesignMatrix& design, const Eigen::VectorXd& returns,
                   const RegressionConfig& config) {
  const auto n = static_cast<Eigen::Index>(design.row_days.size());
  const auto k = static_cast<Eigen::Index>(design.column_names.size());
  if (returns.size() != n)
    throw Error(ErrorCode::ContractError, "returns not aligned to design rows");
  if (n <= k)
    throw Error(ErrorCode::InsufficientData,
                "firm " + design.firm_id + ": dof would be non-positive");

  // Condition gate and (X'X)^{-1} on the full design, dummies included.
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design.values);
  if (qr.rank() < k)
    throw Error(ErrorCode::SingularDesign,
                "firm " + design.firm_id + ": design matrix is rank deficient");
  Eigen::VectorXd rdiag = qr.matrixR().diagonal().head(k).cwiseAbs();
  double cond = rdiag.maxCoeff() / rdiag.minCoeff();
  if (cond > config.condition_bound)
    throw Error(ErrorCode::SingularDesign,
                "firm " + design.firm_id + ": condition number exceeds bound",
                "cond=" + std::to_string(cond));
  Eigen::MatrixXd rinv =
      qr.matrixR().topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(
          Eigen::MatrixXd::Identity(k, k));
  Eigen::MatrixXd xtx_inverse = qr.colsPermutation() * (rinv * rinv.transpose()) *
                                qr.colsPermutation().transpose();

  // Partitioned solve: benchmark coefficients on non-dummy rows, dummy
  // coefficients as realized minus predicted. Dummy-row residuals are zero by
  // construction.
  std::vector<bool> is_dummy_row(static_cast<std::size_t>(n), false);
  for (const auto& dm : design.dummies) is_dummy_row[dm.row] = true;
  const auto kb = static_cast<Eigen::Index>(design.base_columns);
  const auto n_est = n - static_cast<Eigen::Index>(design.dummies.size());

  Eigen::MatrixXd xb(n_est, kb);
  Eigen::VectorXd yb(n_est);
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (is_dummy_row[static_cast<std::size_t>(i)]) continue;
    xb.row(r) = design.values.row(i).head(kb);
    yb(r) = returns(i);
    ++r;
  }
  QrSolve base = solve_checked(xb, yb, config.condition_bound, "firm " + design.firm_id);

  ArEstimate est;
  est.firm_id = design.firm_id;
  est.model = design.model;
  est.alpha = base.beta(0);
  if (design.model == BenchmarkModel::FF3) {
    est.betas["Mkt"] = base.beta(1);
    est.betas["SMB"] = base.beta(2);
    est.betas["HML"] = base.beta(3);
  }
  for (const auto& dm : design.dummies) {
    auto row = static_cast<Eigen::Index>(dm.row);
    double predicted = design.values.row(row).head(kb).dot(base.beta);
    double ar = returns(row) - predicted;
    est.ar_by_event_day[{dm.event_id, dm.offset}] = ar;
    Eigen::VectorXd x_row = design.values.row(row).transpose();
    est.leverage_by_event_day[{dm.event_id, dm.offset}] =
        x_row.dot(xtx_inverse * x_row);
  }

  Eigen::VectorXd resid = yb - xb * base.beta;
  est.residuals = resid;
  est.residual_days.reserve(static_cast<std::size_t>(n_est));
  for (Eigen::Index i = 0; i < n; ++i)
    if (!is_dummy_row[static_cast<std::size_t>(i)])
      est.residual_days.push_back(design.row_days[static_cast<std::size_t>(i)]);

  est.dof = static_cast<int>(n - k);
  est.s_i = std::sqrt(resid.squaredNorm() / static_cast<double>(est.dof));
  est.xtx_inverse = std::move(xtx_inverse);
  return est;
}

ArEstimate fit_ols(const DesignMatrix& design, const RegressionConfig& config) {
  return fit_ols(design, design.response, config);
}

std::map<EventDayKey, double> two_step_abnormal_returns(
    const std::string& firm_id, const ReturnPanel& panel, const FactorSeries& factors,
    const std::vector<ResolvedEvent>& events, const EventWindow& window,
    BenchmarkModel model, const RegressionConfig& config) {
  auto firm = panel.firm_index(firm_id);
  if (!firm)
    throw Error(ErrorCode::ValidationError, "unknown firm " + firm_id);
  const auto fi = static_cast<Eigen::Index>(*firm);

  auto firm_events = firm_events_sorted(events, firm_id);
  check_window_overlap(firm_events, window, panel.calendar.size());

  std::vector<std::pair<EventDayKey, std::size_t>> window_days;
  std::vector<bool> in_window(panel.calendar.size(), false);
  for (const auto& ev : firm_events)
    for (int off = -window.pre_days; off <= window.post_days; ++off) {
      auto day = static_cast<std::size_t>(static_cast<long>(ev.day_index) + off);
      window_days.push_back({{ev.record.event_id, off}, day});
      in_window[day] = true;
    }

  const Eigen::Index kb = model == BenchmarkModel::FF3 ? 4 : 1;
  std::vector<std::size_t> est_days;
  for (std::size_t t = 0; t < panel.calendar.size(); ++t) {
    double ret = panel.excess_returns(fi, static_cast<Eigen::Index>(t));
    if (std::isfinite(ret) && !in_window[t]) est_days.push_back(t);
  }
  if (static_cast<Eigen::Index>(est_days.size()) <= kb)
    throw Error(ErrorCode::InsufficientData,
                "firm " + firm_id + ": too few estimation days");

  auto regressor_row = [&](std::size_t day) {
    Eigen::VectorXd x(kb);
    x(0) = 1.0;
    if (model == BenchmarkModel::FF3) {
      auto t = static_cast<Eigen::Index>(day);
      x(1) = factors.mkt_excess(t);
      x(2) = factors.smb(t);
      x(3) = factors.hml(t);
    }
    return x;
  };

  // Deliberately a different solve route than fit_ols: normal equations + LU.
  Eigen::MatrixXd xtx = Eigen::MatrixXd::Zero(kb, kb);
  Eigen::VectorXd xty = Eigen::VectorXd::Zero(kb);
  for (std::size_t day : est_days) {
    Eigen::VectorXd x = regressor_row(day);
    double y = panel.excess_returns(fi, static_cast<Eigen::Index>(day));
    xtx += x * x.transpose();
    xty += x * y;
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(xtx);
  if (!lu.isInvertible())
    throw Error(ErrorCode::SingularDesign,
                "firm " + firm_id + ": singular normal equations");
  Eigen::VectorXd beta = lu.solve(xty);

  std::map<EventDayKey, double> out;
  for (const auto& [key, day] : window_days) {
    double realized = panel.excess_returns(fi, static_cast<Eigen::Index>(day));
    if (!std::isfinite(realized))
      throw Error(ErrorCode::ValidationError,
                  "event " + key.first + " window day has no return for firm " +
                      firm_id);
    out[key] = realized - regressor_row(day).dot(beta);
  }
  return out;
}

ResidualCorrelation residual_correlation(const std::vector<ArEstimate>& estimates,
                                         CorrelationMode mode, int min_overlap) {
  const std::size_t n = estimates.size();
  if (n < 2)
    throw Error(ErrorCode::InsufficientData,
                "residual correlation needs at least 2 firms");

  ResidualCorrelation out;
  out.matrix = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n),
                                         static_cast<Eigen::Index>(n));

  auto pair_corr = [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    Eigen::VectorXd ac = a.array() - a.mean();
    Eigen::VectorXd bc = b.array() - b.mean();
    double denom = std::sqrt(ac.squaredNorm() * bc.squaredNorm());
    return denom > 0.0 ? ac.dot(bc) / denom : 0.0;
  };

  if (mode == CorrelationMode::Balanced) {
    // Common non-dummy days across all firms.
    std::vector<std::size_t> common = estimates[0].residual_days;
    for (std::size_t i = 1; i < n; ++i) {
      std::vector<std::size_t> next;
      std::set_intersection(common.begin(), common.end(),
                            estimates[i].residual_days.begin(),
                            estimates[i].residual_days.end(),
                            std::back_inserter(next));
      common = std::move(next);
    }
    if (static_cast<int>(common.size()) < min_overlap)
      throw Error(ErrorCode::CoverageError,
                  "only " + std::to_string(common.size()) +
                      " common non-dummy days across firms");
    Eigen::MatrixXd resid(static_cast<Eigen::Index>(common.size()),
                          static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      const auto& days = estimates[i].residual_days;
      std::size_t pos = 0;
      for (std::size_t t = 0; t < common.size(); ++t) {
        while (days[pos] != common[t]) ++pos;
        resid(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(i)) =
            estimates[i].residuals(static_cast<Eigen::Index>(pos));
      }
    }
    resid.rowwise() -= resid.colwise().mean();
    Eigen::VectorXd norms = resid.colwise().norm();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        auto ii = static_cast<Eigen::Index>(i);
        auto jj = static_cast<Eigen::Index>(j);
        double denom = norms(ii) * norms(jj);
        double c = denom > 0.0 ? resid.col(ii).dot(resid.col(jj)) / denom : 0.0;
        out.matrix(ii, jj) = out.matrix(jj, ii) = c;
      }
  } else {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        const auto& di = estimates[i].residual_days;
        const auto& dj = estimates[j].residual_days;
        std::vector<std::size_t> common;
        std::set_intersection(di.begin(), di.end(), dj.begin(), dj.end(),
                              std::back_inserter(common));
        if (static_cast<int>(common.size()) < min_overlap)
          throw Error(ErrorCode::CoverageError,
                      "firms " + estimates[i].firm_id + " and " + estimates[j].firm_id +
                          " share only " + std::to_string(common.size()) +
                          " non-dummy days");
        Eigen::VectorXd a(static_cast<Eigen::Index>(common.size()));
        Eigen::VectorXd b(static_cast<Eigen::Index>(common.size()));
        std::size_t pa = 0, pb = 0;
        for (std::size_t t = 0; t < common.size(); ++t) {
          while (di[pa] != common[t]) ++pa;
          while (dj[pb] != common[t]) ++pb;
          a(static_cast<Eigen::Index>(t)) =
              estimates[i].residuals(static_cast<Eigen::Index>(pa));
          b(static_cast<Eigen::Index>(t)) =
              estimates[j].residuals(static_cast<Eigen::Index>(pb));
        }
        double c = pair_corr(a, b);
        auto ii = static_cast<Eigen::Index>(i);
        auto jj = static_cast<Eigen::Index>(j);
        out.matrix(ii, jj) = out.matrix(jj, ii) = c;
      }
  }

  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      sum += out.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  out.mean_offdiag = sum / (static_cast<double>(n) * (n - 1) / 2.0);
  return out;
}

}  // namespace evstud
