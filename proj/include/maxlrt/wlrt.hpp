#pragma once

#include "maxlrt/event_table.hpp"
#include "maxlrt/numerics.hpp"
#include "maxlrt/weights.hpp"

namespace maxlrt {

struct WlrtResult {
  double w_stat = 0;    // sqrt((n1+n0)/(n1 n0)) * sum w (d1/y1 - d0/y0) y1 y0 / y
  double variance = 0;  // tie-corrected estimator
  double z = 0;         // w_stat / sqrt(variance)
};

struct CovResult {
  Matrix sigma;  // covariance of the weighted statistics
  Matrix corr;   // sigma rescaled to unit diagonal
  Vector w_vec;  // raw statistics
  Vector z_vec;  // standardized statistics
};

/// Per-row increments of the weighted statistic for weight values `w`
/// (one per table row). Rows without both groups at risk contribute 0.
Eigen::ArrayXd statistic_increments(const EventTable& table, const Eigen::ArrayXd& w);

/// Per-row variance increments for a product of two weight columns.
Eigen::ArrayXd variance_increments(const EventTable& table, const Eigen::ArrayXd& w_product);

/// Statistic for an explicit weight column. Throws DegenerateDataError when
/// no row has both groups at risk.
WlrtResult wlrt_statistic(const EventTable& table, const Eigen::ArrayXd& w);
WlrtResult wlrt_statistic(const EventTable& table, const WeightSpec& spec);

/// Statistics and covariance for weight columns (rows x m).
/// Throws DegenerateDataError naming the first zero-variance column.
CovResult cov_matrix(const EventTable& table, const Eigen::ArrayXXd& weights,
                     const std::vector<std::string>& labels = {});
CovResult cov_matrix(const EventTable& table, const WeightSet& set);

/// Running statistic W(t_j) at each event time (partial sums).
Eigen::ArrayXd running_statistic(const EventTable& table, const WeightSpec& spec);

}  // namespace maxlrt
