#include "maxlrt/wlrt.hpp"

#include <cmath>
#include <string>

#include "maxlrt/errors.hpp"

namespace maxlrt {
namespace {

double scale_factor(const EventTable& table) {
  const double n0 = table.n0, n1 = table.n1;
  return std::sqrt((n0 + n1) / (n0 * n1));
}

void require_usable(const EventTable& table) {
  if (table.rows() == 0 || table.usable().sum() == 0)
    throw DegenerateDataError("no event time with both groups at risk");
}

}  // namespace

Eigen::ArrayXd statistic_increments(const EventTable& table, const Eigen::ArrayXd& w) {
  const Eigen::ArrayXd mask = table.usable();
  const Eigen::ArrayXd y = table.y();
  // (d1/y1 - d0/y0) * y1 y0 / y == d1 - d * y1 / y
  const Eigen::ArrayXd observed_minus_expected = table.d1 - table.d() * table.y1 / y;
  return scale_factor(table) * mask * w * observed_minus_expected;
}

Eigen::ArrayXd variance_increments(const EventTable& table, const Eigen::ArrayXd& w_product) {
  const Eigen::ArrayXd mask = table.usable();
  const Eigen::ArrayXd y = table.y();
  const Eigen::ArrayXd d = table.d();
  // (d - 1)/(y - 1) with 0/0 read as 0; y == 1 only occurs on masked rows.
  const Eigen::ArrayXd tie = (y > 1).select((d - 1) / (y - 1), 0.0);
  const double c = scale_factor(table);
  return c * c * mask * w_product * (table.y1 * table.y0 / y) * (1 - tie) * d / y;
}

WlrtResult wlrt_statistic(const EventTable& table, const Eigen::ArrayXd& w) {
  require_usable(table);
  WlrtResult r;
  r.w_stat = statistic_increments(table, w).sum();
  r.variance = std::max(0.0, variance_increments(table, w * w).sum());
  r.z = r.variance > 0 ? r.w_stat / std::sqrt(r.variance) : 0.0;
  return r;
}

WlrtResult wlrt_statistic(const EventTable& table, const WeightSpec& spec) {
  return wlrt_statistic(table, eval_weight(spec, table.f_minus));
}

CovResult cov_matrix(const EventTable& table, const Eigen::ArrayXXd& weights, const std::vector<std::string>& labels) {
  require_usable(table);
  const Eigen::Index m = weights.cols();
  CovResult out;
  out.sigma.resize(m, m);
  out.w_vec.resize(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    out.w_vec[k] = statistic_increments(table, weights.col(k)).sum();
    for (Eigen::Index l = 0; l <= k; ++l) {
      out.sigma(k, l) = out.sigma(l, k) = variance_increments(table, weights.col(k) * weights.col(l)).sum();
    }
  }
  for (Eigen::Index k = 0; k < m; ++k) {
    if (!(out.sigma(k, k) > 0)) {
      const std::string label = k < static_cast<Eigen::Index>(labels.size()) ? labels[k] : "#" + std::to_string(k);
      throw DegenerateDataError("zero variance for weight " + label);
    }
  }
  out.corr = covariance_to_correlation(out.sigma);
  out.z_vec = out.w_vec.array() / out.sigma.diagonal().array().sqrt();
  return out;
}

CovResult cov_matrix(const EventTable& table, const WeightSet& set) {
  std::vector<std::string> labels;
  for (const auto& spec : set.specs) labels.push_back(to_string(spec));
  return cov_matrix(table, eval_weights(set, table.f_minus), labels);
}

Eigen::ArrayXd running_statistic(const EventTable& table, const WeightSpec& spec) {
  const Eigen::ArrayXd inc = statistic_increments(table, eval_weight(spec, table.f_minus));
  Eigen::ArrayXd run(inc.size());
  double acc = 0;
  for (Eigen::Index j = 0; j < inc.size(); ++j) run[j] = acc += inc[j];
  return run;
}

}  // namespace maxlrt
