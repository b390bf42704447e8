#include "maxlrt/event_table.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "maxlrt/errors.hpp"

namespace maxlrt {
namespace {

void validate(const Subject& s) {
  if (!std::isfinite(s.time) || s.time < 0) throw DomainError("subject time must be finite and >= 0");
  if (s.group != 0 && s.group != 1) throw DomainError("subject group must be 0 or 1");
}

}  // namespace

EventTable build_event_table(std::span<const Subject> subjects) {
  int n[2] = {0, 0};
  int events = 0;
  for (const Subject& s : subjects) {
    validate(s);
    ++n[s.group];
    events += s.event;
  }
  if (n[0] == 0 || n[1] == 0) throw DomainError("both groups must be non-empty");
  if (events == 0) throw DegenerateDataError("no events in the pooled sample");

  std::vector<const Subject*> order(subjects.size());
  std::transform(subjects.begin(), subjects.end(), order.begin(), [](const Subject& s) { return &s; });
  std::sort(order.begin(), order.end(), [](const Subject* a, const Subject* b) { return a->time < b->time; });

  std::vector<double> time, y0, y1, d0, d1;
  int at_risk[2] = {n[0], n[1]};
  for (std::size_t i = 0; i < order.size();) {
    const double t = order[i]->time;
    int dead[2] = {0, 0}, leaving[2] = {0, 0};
    for (; i < order.size() && order[i]->time == t; ++i) {
      dead[order[i]->group] += order[i]->event;
      ++leaving[order[i]->group];
    }
    if (dead[0] + dead[1] > 0) {
      time.push_back(t);
      y0.push_back(at_risk[0]);
      y1.push_back(at_risk[1]);
      d0.push_back(dead[0]);
      d1.push_back(dead[1]);
    }
    at_risk[0] -= leaving[0];
    at_risk[1] -= leaving[1];
  }

  const auto to_array = [](const std::vector<double>& v) {
    return Eigen::Map<const Eigen::ArrayXd>(v.data(), static_cast<Eigen::Index>(v.size())).eval();
  };
  EventTable table;
  table.time = to_array(time);
  table.y0 = to_array(y0);
  table.y1 = to_array(y1);
  table.d0 = to_array(d0);
  table.d1 = to_array(d1);
  table.n0 = n[0];
  table.n1 = n[1];
  pooled_km_cdf(table);
  return table;
}

void pooled_km_cdf(EventTable& table) {
  const Eigen::Index rows = table.rows();
  table.f_minus.resize(rows);
  double survival = 1.0;
  for (Eigen::Index j = 0; j < rows; ++j) {
    table.f_minus[j] = 1.0 - survival;
    const double at_risk = table.y0[j] + table.y1[j];
    survival *= 1.0 - (table.d0[j] + table.d1[j]) / at_risk;
  }
}

std::pair<double, double> censoring_rates(std::span<const Subject> subjects) {
  double n[2] = {0, 0}, censored[2] = {0, 0};
  for (const Subject& s : subjects) {
    validate(s);
    n[s.group] += 1;
    censored[s.group] += !s.event;
  }
  if (n[0] == 0 || n[1] == 0) throw DomainError("censoring_rates: both groups must be non-empty");
  return {censored[0] / n[0], censored[1] / n[1]};
}

}  // namespace maxlrt
