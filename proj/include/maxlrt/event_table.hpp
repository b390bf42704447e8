#pragma once

#include <Eigen/Dense>

#include <span>
#include <utility>
#include <vector>

namespace maxlrt {

/// One right-censored observation.
struct Subject {
  double time = 0;     // observed time (weeks)
  bool event = false;  // true: event observed, false: censored
  int group = 0;       // 0 or 1
};

/// Risk and event counts at the pooled distinct event times.
///
/// Every column has one entry per event time, ascending. "At risk at t"
/// means observed time >= t, so a subject censored at t is still at risk for
/// events at t. Rows where one group has nobody at risk are kept; the
/// statistics give them zero weight (see `usable()`).
struct EventTable {
  Eigen::ArrayXd time;
  Eigen::ArrayXd y0, y1;  // at-risk counts
  Eigen::ArrayXd d0, d1;  // event counts
  Eigen::ArrayXd f_minus; // pooled left-continuous Kaplan-Meier CDF, F(t-)
  int n0 = 0, n1 = 0;     // group sizes

  Eigen::Index rows() const { return time.size(); }
  Eigen::ArrayXd y() const { return y0 + y1; }
  Eigen::ArrayXd d() const { return d0 + d1; }
  /// 1 where both groups are at risk, else 0.
  Eigen::ArrayXd usable() const { return ((y0 > 0) && (y1 > 0)).cast<double>(); }
};

/// Tabulates risk sets and events. Throws DegenerateDataError when there is no
/// event and DomainError when a group is empty or a record is invalid.
EventTable build_event_table(std::span<const Subject> subjects);

/// Fills `table.f_minus` with 1 - prod_{k<j} (1 - d_k / y_k).
void pooled_km_cdf(EventTable& table);

/// Fraction of censored records in group 0 and group 1.
std::pair<double, double> censoring_rates(std::span<const Subject> subjects);

}  // namespace maxlrt
