#pragma once

#include <Eigen/Dense>
#include <vector>

#include "evstud/regression.hpp"

namespace evstud {

/// Stacked firm system on a balanced panel: every equation shares the row
/// calendar; dummy columns stay firm-specific.
struct SurSystem {
  std::vector<std::string> firm_order;
  std::vector<DesignMatrix> designs;
  Eigen::MatrixXd sigma_hat;  // n x n residual covariance, divisor T
};

struct SurEstimate {
  std::vector<ArEstimate> firm_estimates;  // same layout as the OLS output
  Eigen::MatrixXd coefficient_covariance;  // joint, block order = firm_order
  Eigen::MatrixXd sigma_hat;
  int iterations = 0;
};

/// Per-equation OLS residuals seed sigma_hat = E'E / T.
SurSystem assemble_system(const ReturnPanel& limited_panel, const FactorSeries& factors,
                          const std::vector<ResolvedEvent>& events,
                          const EventWindow& window, BenchmarkModel model,
                          const RegressionConfig& config = {});

/// One-step feasible GLS by default; iterated FGLS behind the flag. Solves the
/// block normal equations sigma^{ij} X_i'X_j without materializing the
/// Kronecker product.
SurEstimate fit_sur(const SurSystem& system, bool iterate = false, double tol = 1e-8,
                    int max_iter = 20);

}  // namespace evstud
