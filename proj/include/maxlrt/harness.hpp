#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "maxlrt/omnibus.hpp"
#include "maxlrt/simgen.hpp"

namespace maxlrt {

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

enum class TestKind { Logrank, FH11, MaxCombo, PhiStar, Projection, Renyi };

/// Upper: alternative of a higher cumulative hazard in group 1.
enum class Sidedness { TwoSided, Upper, Lower };

struct TestSpec {
  TestKind kind = TestKind::Logrank;
  std::vector<double> thetas;  // PhiStar only: one theta, or several crossing points

  /// Weights the test is built from.
  WeightSet weights() const;
  /// Short name: logrank, fh11, maxc, phi-star(0.5), projt, renyi.
  std::string name() const;
  /// Column heading: Logrank, FH11, maxC, phi*(0.5), ProjT, Renyi.
  std::string heading() const;
};

/// Accepts the short names above; phi-star takes 1 to 7 thetas. Throws LookupError.
TestSpec parse_test(std::string_view name);
/// Comma-separated list; commas inside parentheses belong to the test name.
std::vector<TestSpec> parse_tests(std::string_view list);
/// Logrank, FH11, maxC, phi*(0.5), ProjT, Renyi.
std::vector<TestSpec> standard_tests();

Sidedness parse_sidedness(std::string_view s);  // two-sided, upper, lower
std::string to_string(Sidedness s);

struct TestOutcome {
  double statistic = 0;  // z, signed max |z|, S_n or Q
  double p_value = 1;
};

/// p-value of one test on one table. Projection and Renyi are two-sided only
/// (DomainError otherwise). MVN-based tests draw from `mvn_rng`.
TestOutcome evaluate_test(const TestSpec& test, const EventTable& table, Sidedness sided, const RngStream& mvn_rng,
                          const MvnOptions& mvn = {});

/// Same decision as evaluate_test(...).p_value < alpha. MVN probabilities are
/// first estimated coarsely and refined only when the estimate is within a few
/// standard errors of the level.
bool rejects(const TestSpec& test, const EventTable& table, double alpha, Sidedness sided, const RngStream& mvn_rng);

// ---------------------------------------------------------------------------
// Replications
// ---------------------------------------------------------------------------

struct RunOptions {
  int reps = 2000;
  double alpha = 0.05;
  Sidedness sided = Sidedness::TwoSided;
  std::uint64_t seed = 1;
  int threads = 0;  // 0: hardware concurrency
};

struct SimReport {
  Scenario scenario;
  std::vector<std::string> tests;     // TestSpec::name()
  std::vector<double> rejection_rate; // one per test
  double censoring_g0 = 0;            // mean realized censoring per group
  double censoring_g1 = 0;
  int reps = 0;
  std::uint64_t seed = 0;
  double alpha = 0.05;
  Sidedness sided = Sidedness::TwoSided;
  int regenerated = 0;                // replications redrawn after degenerate data
};

/// Replication r draws its trial from RngStream(seed).substream(r) (attempt
/// substreams on regeneration), so results do not depend on `threads`.
SimReport run_scenario(const Scenario& scn, const std::vector<TestSpec>& tests, const RunOptions& options);

/// Scenario seed derived from a master seed and the scenario's grid position.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Runs each scenario with seed derive_seed(options.seed, i).
std::vector<SimReport> run_grid(const std::vector<Scenario>& scenarios, const std::vector<TestSpec>& tests,
                                const RunOptions& options);

// ---------------------------------------------------------------------------
// Power tables and ranking
// ---------------------------------------------------------------------------

/// One CSV row: a test's rejection rate in one scenario.
struct PowerRow {
  Mechanism mechanism = Mechanism::TypeI;
  int n_total = 0;
  HazardCase hazard_case = HazardCase::H;
  double phi0 = 0, phi1 = 0;
  std::string test;
  double rejection_rate = 0;
  int reps = 0;
  std::uint64_t seed = 0;
  double beta = 0;             // scenario identity beyond (mechanism, N, case)
  double event_fraction = 1;
};

std::vector<PowerRow> to_rows(const SimReport& report);
std::vector<PowerRow> to_rows(const std::vector<SimReport>& reports);

struct RankTable {
  std::vector<std::string> tests;
  std::vector<double> crossing;  // summed scores over crossing scenarios
  std::vector<double> total;     // summed scores over every alternative
  int crossing_scenarios = 0;
  int total_scenarios = 0;
};

/// Ranks tests within each non-null scenario by power rounded to 0.1
/// percentage point: the most powerful gets T points, the least 1, ties share
/// the average. Throws InputError when a scenario lacks one of the tests.
RankTable ranking_scores(const std::vector<PowerRow>& rows);

/// Score vector of one scenario (helper of ranking_scores).
std::vector<double> rank_scores(const std::vector<double>& powers);

// ---------------------------------------------------------------------------
// Built-in grids
// ---------------------------------------------------------------------------

inline const std::vector<double> kTypeOneBetas = {15, 25, 40};
inline const std::vector<int> kSampleSizes = {60, 120, 240};
inline const std::vector<double> kTypeTwoCensoring = {1.0 / 6, 1.0 / 3, 0.5};
inline const std::vector<double> kThetaGrid = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};

/// Type I grid in beta-major, then N, then case order.
std::vector<Scenario> type_one_grid(const std::vector<HazardCase>& cases);
/// Type II grid (beta 12) in censoring-major, then N, then case order.
std::vector<Scenario> type_two_grid(const std::vector<HazardCase>& cases);

std::vector<HazardCase> alternative_cases();  // A..G

/// Power of phi-star(theta) for every theta; one report per scenario with one
/// test per theta.
std::vector<SimReport> sensitivity_sweep(const std::vector<Scenario>& scenarios, const std::vector<double>& theta_grid,
                                         const RunOptions& options);

/// The six N=240 Type I crossing scenarios (beta-major, case A then B).
std::vector<Scenario> sensitivity_scenarios();

/// phi-star(0.2,0.5,0.8) over the Type I beta x N grid for cases A, G and H.
std::vector<SimReport> crossing_only_extension(const RunOptions& options);

/// Table ids 1, 2, 3, 4, 7 and 9 produce power rows; 5 and 6 rank the rows of
/// 3 and 4. Throws LookupError for other ids.
struct TableResult {
  int id = 0;
  std::vector<SimReport> reports;
  RankTable ranks;  // filled for 5 and 6
};
TableResult reproduce_table(int id, const RunOptions& options);
bool is_table_id(int id);

}  // namespace maxlrt
