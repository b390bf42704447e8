#pragma once

#include <map>
#include <string>

#include "maxlrt/wlrt.hpp"

namespace maxlrt {

/// Maximum of standardized weighted logrank statistics.
///
/// One-sided p-values use signed_t = sign(z_1) * t_max, where z_1 belongs to
/// the first weight of the set (the logrank weight for every builtin set).
/// Large positive values favour a higher hazard in group 1.
struct ComboResult {
  Vector z_vec;
  Matrix corr;
  double t_max = 0;
  double signed_t = 0;
  double p_two_sided = 1;
  double p_one_sided_lower = 1;  // P(T <= signed_t)
  double p_one_sided_upper = 1;  // P(T >= signed_t)
  double c_alpha = 0;            // two-sided critical value, NaN when not computed
};

struct ProjectionResult {
  double s_n = 0;
  int rank = 0;
  double p_value = 1;
};

struct RenyiResult {
  double q = 0;
  double p_value = 1;
};

struct ComboOptions {
  MvnOptions mvn;
  bool critical_value = true;
};

/// Bracket [lo, hi] that contains c_alpha for m statistics at level alpha.
std::pair<double, double> critical_value_bounds(double alpha, int m);

/// Two-sided critical value c with P(max |Z| < c) = 1 - alpha, Z ~ N(0, corr).
double critical_value(const Matrix& corr, double alpha, const RngStream& rng, const MvnOptions& mvn = {});

/// Two-sided p-value P(max |Z| >= t_max).
double max_abs_p_value(const Matrix& corr, double t_max, const RngStream& rng, const MvnOptions& mvn = {});

ComboResult max_combo_test(const CovResult& cov, double alpha, const RngStream& rng, const ComboOptions& options = {});
ComboResult max_combo_test(const EventTable& table, const WeightSet& set, double alpha, const RngStream& rng,
                           const ComboOptions& options = {});

ProjectionResult projection_test(const CovResult& cov, double rank_tol = 1e-10);
ProjectionResult projection_test(const EventTable& table, const WeightSet& set);

RenyiResult renyi_test(const EventTable& table, const WeightSpec& spec = Constant{});

/// Flat key/value view for reports.
std::map<std::string, double> to_record(const ComboResult& r);
std::map<std::string, double> to_record(const ProjectionResult& r);
std::map<std::string, double> to_record(const RenyiResult& r);

}  // namespace maxlrt
