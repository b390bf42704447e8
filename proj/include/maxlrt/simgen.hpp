#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "maxlrt/event_table.hpp"
#include "maxlrt/rng.hpp"

namespace maxlrt {

/// TypeI: administrative end at a fixed calendar week.
/// TypeII: stop at a prespecified number of events.
enum class Mechanism { TypeI, TypeII };

/// Hazard-ratio shapes g(t) = lambda1(t) / lambda0(t).
enum class HazardCase {
  A,  // crossing 1: 0.5 -> linear ramp on [10, 25] -> 1.5
  B,  // crossing 2: 3 exp(-0.3 t) + 0.8
  C,  // delayed diverging: 1.5 / (1 + exp(-0.5 (t - 20))) + 1
  D,  // diverging: exp(0.03 t)
  E,  // converging 1: exp(1 / (0.2 t + 1))
  F,  // converging 2: 1 - (t - 50)^2 / 5000 up to week 40, then 0.98
  G,  // constant 1.5
  H,  // equal hazards (null)
};

struct LogLogistic {
  double alpha = 2;   // shape
  double beta = 15;   // scale, weeks
};

struct Scenario {
  Mechanism mechanism = Mechanism::TypeI;
  int n_total = 240;                  // 1:1 allocation
  LogLogistic baseline;
  HazardCase hazard_case = HazardCase::H;
  double target_event_fraction = 1.0; // TypeII only
  double accrual_weeks = 18;
  double admin_end_weeks = 42;        // TypeI only

  /// Fixed-length study: 18-week accrual, end at week 42.
  static Scenario type_one(int n_total, double beta, HazardCase c, double alpha = 2);
  /// Event-driven study: 24-week accrual, stop at round(N (1 - censoring_rate)) events.
  static Scenario type_two(int n_total, double censoring_rate, HazardCase c, double beta = 12, double alpha = 2);
};

struct TrialData {
  std::vector<Subject> subjects;  // analysis set
  double censoring_g0 = 0;        // over all enrolled-or-planned subjects
  double censoring_g1 = 0;
  double duration = 0;            // calendar week at which the study stopped
  int dropped = 0;                // TypeII subjects enrolled after the stop
};

/// Throws DomainError on an invalid scenario.
void validate(const Scenario& scn);

/// Log-logistic inverse survival: solves S(t) = u with S(t) = beta^a / (beta^a + t^a).
double baseline_time(double alpha, double beta, double u);
double baseline_hazard(double alpha, double beta, double t);
double baseline_cumulative_hazard(double alpha, double beta, double t);

double hazard_ratio(HazardCase c, double t);

/// Cumulative hazard of group 1, Lambda1(t) = int_0^t g(s) lambda0(s) ds, with
/// cached integrals over a knot grid so that repeated inversions are cheap.
class Group1Sampler {
 public:
  Group1Sampler(HazardCase c, double alpha, double beta);

  double cumulative_hazard(double t) const;
  /// Solves Lambda1(t) = -ln u. Throws NumericError when t would exceed 1e6 weeks.
  double time(double u) const;

 private:
  double integrand(double t) const;

  HazardCase case_;
  double alpha_, beta_;
  std::vector<double> knots_;
  std::vector<double> prefix_;  // Lambda1 at each knot
};

/// One-off inversion; builds a sampler per call.
double group1_time(HazardCase c, double alpha, double beta, double u);

/// Reusable per-scenario generator.
class TrialGenerator {
 public:
  explicit TrialGenerator(const Scenario& scn);
  TrialData generate(RngStream& rng) const;
  const Scenario& scenario() const { return scn_; }

 private:
  Scenario scn_;
  Group1Sampler sampler_;
  double horizon_hazard_;  // Lambda1(admin end) for the TypeI shortcut
};

TrialData generate_trial(const Scenario& scn, RngStream& rng);

// Text forms and scenario files -------------------------------------------

std::string to_string(Mechanism m);
std::string to_string(HazardCase c);
Mechanism parse_mechanism(std::string_view s);
HazardCase parse_hazard_case(std::string_view s);
std::string case_label(HazardCase c);  // "Crossing 1", "Constant", ...
bool is_crossing(HazardCase c);

/// Parses `key = value` lines ('#' starts a comment). Keys: mechanism,
/// n_total, alpha, beta, hazard_case, target_event_fraction (or
/// censoring_rate), accrual_weeks, admin_end_weeks. Throws InputError.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::string& path);
std::string format_scenario(const Scenario& scn);

}  // namespace maxlrt
