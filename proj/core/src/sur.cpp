#include "evstud/sur.hpp"

#include <cmath>

#include "evstud/errors.hpp"

namespace evstud {

namespace {

Eigen::MatrixXd full_residual_matrix(const std::vector<DesignMatrix>& designs,
                                     const std::vector<Eigen::VectorXd>& betas) {
  const auto t_rows = static_cast<Eigen::Index>(designs[0].row_days.size());
  const auto n = static_cast<Eigen::Index>(designs.size());
  Eigen::MatrixXd e(t_rows, n);
  for (Eigen::Index i = 0; i < n; ++i)
    e.col(i) = designs[static_cast<std::size_t>(i)].response -
               designs[static_cast<std::size_t>(i)].values * betas[static_cast<std::size_t>(i)];
  return e;
}

/// PD gate with a single ridge repair; larger repairs abort.
Eigen::LLT<Eigen::MatrixXd> factor_sigma(Eigen::MatrixXd& sigma) {
  const auto n = sigma.rows();
  const double scale = sigma.trace() / static_cast<double>(n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sigma,
                                                     Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < 1e-12 * scale)
    sigma += (1e-10 * scale) * Eigen::MatrixXd::Identity(n, n);
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorCode::NumericalError,
                "sigma_hat is not positive definite after ridge repair",
                "min_eig=" + std::to_string(eig.eigenvalues().minCoeff()));
  return llt;
}

struct StackedSolve {
  std::vector<Eigen::VectorXd> betas;
  Eigen::MatrixXd coefficient_covariance;
};

StackedSolve solve_fgls(const std::vector<DesignMatrix>& designs,
                        const std::vector<std::vector<Eigen::MatrixXd>>& cross_xx,
                        const std::vector<std::vector<Eigen::VectorXd>>& cross_xy,
                        const Eigen::MatrixXd& sigma_inverse,
                        bool with_covariance) {
  const std::size_t n = designs.size();
  std::vector<Eigen::Index> offset(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i)
    offset[i + 1] = offset[i] + designs[i].values.cols();
  const Eigen::Index total = offset[n];

  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(total, total);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(total);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double w = sigma_inverse(static_cast<Eigen::Index>(i),
                               static_cast<Eigen::Index>(j));
      if (w == 0.0) continue;
      g.block(offset[i], offset[j], designs[i].values.cols(),
              designs[j].values.cols()) += w * cross_xx[i][j];
      rhs.segment(offset[i], designs[i].values.cols()) += w * cross_xy[i][j];
    }
  }

  Eigen::LDLT<Eigen::MatrixXd> ldlt(g);
  if (ldlt.info() != Eigen::Success)
    throw Error(ErrorCode::NumericalError, "stacked GLS normal equations failed",
                "dim=" + std::to_string(total));
  Eigen::VectorXd beta = ldlt.solve(rhs);

  StackedSolve out;
  out.betas.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    out.betas.push_back(beta.segment(offset[i], designs[i].values.cols()));
  if (with_covariance)
    out.coefficient_covariance = ldlt.solve(Eigen::MatrixXd::Identity(total, total));
  return out;
}

ArEstimate estimate_from_beta(const DesignMatrix& design, const Eigen::VectorXd& beta) {
  const auto n = static_cast<Eigen::Index>(design.row_days.size());
  const auto k = static_cast<Eigen::Index>(design.column_names.size());

  ArEstimate est;
  est.firm_id = design.firm_id;
  est.model = design.model;
  est.alpha = beta(0);
  if (design.model == BenchmarkModel::FF3) {
    est.betas["Mkt"] = beta(1);
    est.betas["SMB"] = beta(2);
    est.betas["HML"] = beta(3);
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design.values);
  Eigen::MatrixXd rinv =
      qr.matrixR().topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(
          Eigen::MatrixXd::Identity(k, k));
  est.xtx_inverse = qr.colsPermutation() * (rinv * rinv.transpose()) *
                    qr.colsPermutation().transpose();

  std::vector<bool> is_dummy_row(static_cast<std::size_t>(n), false);
  for (const auto& dm : design.dummies) {
    is_dummy_row[dm.row] = true;
    est.ar_by_event_day[{dm.event_id, dm.offset}] =
        beta(static_cast<Eigen::Index>(dm.column));
    Eigen::VectorXd x_row = design.values.row(static_cast<Eigen::Index>(dm.row)).transpose();
    est.leverage_by_event_day[{dm.event_id, dm.offset}] =
        x_row.dot(est.xtx_inverse * x_row);
  }

  Eigen::VectorXd full_resid = design.response - design.values * beta;
  est.dof = static_cast<int>(n - k);
  est.s_i = std::sqrt(full_resid.squaredNorm() / static_cast<double>(est.dof));
  est.residuals.resize(n - static_cast<Eigen::Index>(design.dummies.size()));
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (is_dummy_row[static_cast<std::size_t>(i)]) continue;
    est.residuals(r++) = full_resid(i);
    est.residual_days.push_back(design.row_days[static_cast<std::size_t>(i)]);
  }
  return est;
}

}  // namespace

SurSystem assemble_system(const ReturnPanel& limited_panel, const FactorSeries& factors,
                          const std::vector<ResolvedEvent>& events,
                          const EventWindow& window, BenchmarkModel model,
                          const RegressionConfig& config) {
  if (!limited_panel.excess_returns.allFinite())
    throw Error(ErrorCode::ContractError,
                "SUR requires a balanced panel with no missing returns");

  RegressionConfig balanced_config = config;
  balanced_config.require_balanced = true;

  SurSystem system;
  system.firm_order = limited_panel.firm_ids;
  system.designs.reserve(limited_panel.firm_ids.size());
  std::vector<Eigen::VectorXd> ols_betas;
  for (const auto& firm : system.firm_order) {
    DesignMatrix d =
        build_design(firm, limited_panel, factors, events, window, model, balanced_config);
    ArEstimate ols = fit_ols(d, balanced_config);
    Eigen::VectorXd beta(d.values.cols());
    beta(0) = ols.alpha;
    if (model == BenchmarkModel::FF3) {
      beta(1) = ols.betas.at("Mkt");
      beta(2) = ols.betas.at("SMB");
      beta(3) = ols.betas.at("HML");
    }
    for (const auto& dm : d.dummies)
      beta(static_cast<Eigen::Index>(dm.column)) =
          ols.ar_by_event_day.at({dm.event_id, dm.offset});
    ols_betas.push_back(std::move(beta));
    system.designs.push_back(std::move(d));
  }

  const auto t_rows = static_cast<double>(system.designs[0].row_days.size());
  Eigen::MatrixXd e = full_residual_matrix(system.designs, ols_betas);
  system.sigma_hat = (e.transpose() * e) / t_rows;
  return system;
}

SurEstimate fit_sur(const SurSystem& system, bool iterate, double tol, int max_iter) {
  const std::size_t n = system.designs.size();
  if (n == 0)
    throw Error(ErrorCode::ContractError, "empty SUR system");
  const auto t_rows = system.designs[0].row_days.size();
  for (const auto& d : system.designs)
    if (d.row_days.size() != t_rows)
      throw Error(ErrorCode::ContractError,
                  "SUR designs must share the same row count");

  std::vector<std::vector<Eigen::MatrixXd>> cross_xx(n);
  std::vector<std::vector<Eigen::VectorXd>> cross_xy(n);
  for (std::size_t i = 0; i < n; ++i) {
    cross_xx[i].resize(n);
    cross_xy[i].resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      cross_xx[i][j] = system.designs[i].values.transpose() * system.designs[j].values;
      cross_xy[i][j] = system.designs[i].values.transpose() * system.designs[j].response;
    }
  }

  auto invert_sigma = [&](Eigen::MatrixXd sigma) {
    Eigen::LLT<Eigen::MatrixXd> llt = factor_sigma(sigma);
    return std::pair<Eigen::MatrixXd, Eigen::MatrixXd>{
        llt.solve(Eigen::MatrixXd::Identity(sigma.rows(), sigma.rows())),
        std::move(sigma)};
  };

  auto [sigma_inverse, sigma] = invert_sigma(system.sigma_hat);
  StackedSolve current = solve_fgls(system.designs, cross_xx, cross_xy, sigma_inverse,
                                    /*with_covariance=*/!iterate);

  int iterations = 0;
  if (iterate) {
    for (; iterations < max_iter; ++iterations) {
      Eigen::MatrixXd e = full_residual_matrix(system.designs, current.betas);
      Eigen::MatrixXd next_sigma = (e.transpose() * e) / static_cast<double>(t_rows);
      auto [next_inverse, repaired] = invert_sigma(std::move(next_sigma));
      StackedSolve candidate =
          solve_fgls(system.designs, cross_xx, cross_xy, next_inverse, false);
      double delta = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        delta = std::max(delta,
                         (candidate.betas[i] - current.betas[i]).cwiseAbs().maxCoeff());
      if (delta < tol) break;
      current.betas = std::move(candidate.betas);
      sigma_inverse = std::move(next_inverse);
      sigma = std::move(repaired);
    }
    current = solve_fgls(system.designs, cross_xx, cross_xy, sigma_inverse, true);
  }

  SurEstimate out;
  out.sigma_hat = std::move(sigma);
  out.iterations = iterations;
  out.coefficient_covariance = std::move(current.coefficient_covariance);
  out.firm_estimates.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    out.firm_estimates.push_back(estimate_from_beta(system.designs[i], current.betas[i]));
  return out;
}

}  // namespace evstud
