#include "maxlrt/omnibus.hpp"

#include <cmath>
#include <limits>

#include "maxlrt/errors.hpp"

namespace maxlrt {

std::pair<double, double> critical_value_bounds(double alpha, int m) {
  if (!(alpha > 0 && alpha < 0.5)) throw DomainError("alpha must lie in (0, 0.5)");
  if (m < 1) throw DomainError("at least one statistic is required");
  // perfectly correlated statistics .. independent statistics
  const double lo = normal_quantile(1.0 - alpha / 2.0);
  const double hi = normal_quantile(0.5 + std::pow(1.0 - alpha, 1.0 / m) / 2.0);
  return {lo, hi};
}

double max_abs_p_value(const Matrix& corr, double t_max, const RngStream& rng, const MvnOptions& mvn) {
  if (!(t_max > 0)) return 1.0;
  const Eigen::Index m = corr.rows();
  const double inside = mvn_rect_prob(corr, Vector::Constant(m, -t_max), Vector::Constant(m, t_max), rng, mvn).probability;
  return std::clamp(1.0 - inside, 0.0, 1.0);
}

double critical_value(const Matrix& corr, double alpha, const RngStream& rng, const MvnOptions& mvn) {
  const int m = static_cast<int>(corr.rows());
  auto [lo, hi] = critical_value_bounds(alpha, m);
  lo *= 0.9;
  hi *= 1.1;
  const auto excess = [&](double c) {
    return mvn_rect_prob(corr, Vector::Constant(m, -c), Vector::Constant(m, c), rng, mvn).probability - (1.0 - alpha);
  };
  return find_root(excess, lo, hi, 1e-7);
}

ComboResult max_combo_test(const CovResult& cov, double alpha, const RngStream& rng, const ComboOptions& options) {
  if (!(alpha > 0 && alpha < 0.5)) throw DomainError("alpha must lie in (0, 0.5)");
  ComboResult r;
  r.z_vec = cov.z_vec;
  r.corr = cov.corr;
  r.t_max = cov.z_vec.cwiseAbs().maxCoeff();
  r.signed_t = (cov.z_vec[0] < 0 ? -1.0 : 1.0) * r.t_max;
  r.p_two_sided = max_abs_p_value(cov.corr, r.t_max, rng, options.mvn);

  // Z and -Z have the same null law, so sign(Z_1) is a fair coin independent
  // of max |Z|: P(T >= t) = p2(t)/2 for t > 0 and 1 - p2(|t|)/2 otherwise.
  const double half = 0.5 * r.p_two_sided;
  if (r.t_max == 0) {
    r.p_one_sided_upper = r.p_one_sided_lower = 1.0;
  } else if (r.signed_t > 0) {
    r.p_one_sided_upper = half;
    r.p_one_sided_lower = 1.0 - half;
  } else {
    r.p_one_sided_upper = 1.0 - half;
    r.p_one_sided_lower = half;
  }
  r.c_alpha = options.critical_value ? critical_value(cov.corr, alpha, rng, options.mvn)
                                     : std::numeric_limits<double>::quiet_NaN();
  return r;
}

ComboResult max_combo_test(const EventTable& table, const WeightSet& set, double alpha, const RngStream& rng,
                           const ComboOptions& options) {
  return max_combo_test(cov_matrix(table, set), alpha, rng, options);
}

ProjectionResult projection_test(const CovResult& cov, double rank_tol) {
  const auto pinv = pseudo_inverse(cov.corr, rank_tol);
  if (pinv.rank == 0) throw DegenerateDataError("projection test: covariance has rank 0");
  ProjectionResult r;
  r.rank = pinv.rank;
  r.s_n = std::max(0.0, cov.z_vec.dot(pinv.matrix * cov.z_vec));
  r.p_value = chisq_sf(r.s_n, r.rank);
  return r;
}

ProjectionResult projection_test(const EventTable& table, const WeightSet& set) {
  return projection_test(cov_matrix(table, set));
}

RenyiResult renyi_test(const EventTable& table, const WeightSpec& spec) {
  const Eigen::ArrayXd w = eval_weight(spec, table.f_minus);
  const WlrtResult end = wlrt_statistic(table, w);
  if (!(end.variance > 0)) throw DegenerateDataError("renyi test: zero variance");
  const Eigen::ArrayXd inc = statistic_increments(table, w);
  double running = 0, sup = 0;
  for (Eigen::Index j = 0; j < inc.size(); ++j) {
    running += inc[j];
    sup = std::max(sup, std::abs(running));
  }
  RenyiResult r;
  r.q = sup / std::sqrt(end.variance);
  r.p_value = r.q > 0 ? brownian_sup_sf(r.q) : 1.0;
  return r;
}

std::map<std::string, double> to_record(const ComboResult& r) {
  return {{"t_max", r.t_max},
          {"signed_t", r.signed_t},
          {"p_two_sided", r.p_two_sided},
          {"p_one_sided_lower", r.p_one_sided_lower},
          {"p_one_sided_upper", r.p_one_sided_upper},
          {"c_alpha", r.c_alpha}};
}

std::map<std::string, double> to_record(const ProjectionResult& r) {
  return {{"s_n", r.s_n}, {"rank", static_cast<double>(r.rank)}, {"p_value", r.p_value}};
}

std::map<std::string, double> to_record(const RenyiResult& r) { return {{"q", r.q}, {"p_value", r.p_value}}; }

}  // namespace maxlrt
