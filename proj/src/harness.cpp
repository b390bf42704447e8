#include "maxlrt/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <thread>
#include <tuple>

#include "maxlrt/errors.hpp"
#include "maxlrt/text.hpp"

namespace maxlrt {
namespace {

constexpr int kMaxRedraws = 100;

std::string format_number(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string theta_list(const std::vector<double>& thetas) {
  std::string out;
  for (std::size_t i = 0; i < thetas.size(); ++i) out += (i ? "," : "") + format_number(thetas[i]);
  return out;
}

double one_sided_p(double z, Sidedness sided) {
  switch (sided) {
    case Sidedness::Upper: return normal_sf(z);
    case Sidedness::Lower: return normal_cdf(z);
    case Sidedness::TwoSided: break;
  }
  return std::min(1.0, 2.0 * normal_sf(std::abs(z)));
}

void require_two_sided(const TestSpec& test, Sidedness sided) {
  if (sided != Sidedness::TwoSided) throw DomainError(test.name() + " has no one-sided version");
}

bool uses_mvn(TestKind kind) { return kind == TestKind::MaxCombo || kind == TestKind::PhiStar; }

}  // namespace

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

WeightSet TestSpec::weights() const {
  switch (kind) {
    case TestKind::Logrank: return builtin_set("logrank");
    case TestKind::FH11: return builtin_set("fh11");
    case TestKind::MaxCombo: return builtin_set("maxcombo");
    case TestKind::PhiStar: return builtin_set("phi-star(" + theta_list(thetas) + ")");
    case TestKind::Projection: return builtin_set("projection-crossing");
    case TestKind::Renyi: return builtin_set("logrank");
  }
  throw LookupError("unknown test kind");
}

std::string TestSpec::name() const {
  switch (kind) {
    case TestKind::Logrank: return "logrank";
    case TestKind::FH11: return "fh11";
    case TestKind::MaxCombo: return "maxc";
    case TestKind::PhiStar: return "phi-star(" + theta_list(thetas) + ")";
    case TestKind::Projection: return "projt";
    case TestKind::Renyi: return "renyi";
  }
  return "";
}

std::string TestSpec::heading() const {
  switch (kind) {
    case TestKind::Logrank: return "Logrank";
    case TestKind::FH11: return "FH11";
    case TestKind::MaxCombo: return "maxC";
    case TestKind::PhiStar: return "phi*(" + theta_list(thetas) + ")";
    case TestKind::Projection: return "ProjT";
    case TestKind::Renyi: return "Renyi";
  }
  return "";
}

TestSpec parse_test(std::string_view raw) {
  const std::string name = trim(raw);
  if (name == "logrank") return {TestKind::Logrank, {}};
  if (name == "fh11") return {TestKind::FH11, {}};
  if (name == "maxc" || name == "maxcombo") return {TestKind::MaxCombo, {}};
  if (name == "projt" || name == "projection") return {TestKind::Projection, {}};
  if (name == "renyi") return {TestKind::Renyi, {}};
  if (name.starts_with("phi-star(")) {
    // builtin_set validates the theta list
    const WeightSet set = builtin_set(name);
    TestSpec spec{TestKind::PhiStar, {}};
    for (std::size_t k = 0; k < set.specs.size(); ++k)
      if (const auto* c = std::get_if<Crossing>(&set.specs[k])) spec.thetas.push_back(c->theta);
    return spec;
  }
  throw LookupError("unknown test: " + name);
}

std::vector<TestSpec> parse_tests(std::string_view list) {
  std::vector<TestSpec> out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= list.size(); ++i) {
    if (i == list.size() || (list[i] == ',' && depth == 0)) {
      if (!trim(list.substr(start, i - start)).empty()) out.push_back(parse_test(list.substr(start, i - start)));
      start = i + 1;
    } else if (list[i] == '(') {
      ++depth;
    } else if (list[i] == ')') {
      --depth;
    }
  }
  if (out.empty()) throw LookupError("no tests given");
  return out;
}

std::vector<TestSpec> standard_tests() {
  return {{TestKind::Logrank, {}},         {TestKind::FH11, {}},       {TestKind::MaxCombo, {}},
          {TestKind::PhiStar, {0.5}},      {TestKind::Projection, {}}, {TestKind::Renyi, {}}};
}

Sidedness parse_sidedness(std::string_view raw) {
  const std::string s = trim(raw);
  if (s == "two-sided" || s == "two") return Sidedness::TwoSided;
  if (s == "upper" || s == "greater") return Sidedness::Upper;
  if (s == "lower" || s == "less") return Sidedness::Lower;
  throw LookupError("unknown sidedness: " + s);
}

std::string to_string(Sidedness s) {
  switch (s) {
    case Sidedness::TwoSided: return "two-sided";
    case Sidedness::Upper: return "upper";
    case Sidedness::Lower: return "lower";
  }
  return "";
}

TestOutcome evaluate_test(const TestSpec& test, const EventTable& table, Sidedness sided, const RngStream& mvn_rng,
                          const MvnOptions& mvn) {
  switch (test.kind) {
    case TestKind::Logrank:
    case TestKind::FH11: {
      const WlrtResult r = wlrt_statistic(table, test.weights().specs.front());
      if (!(r.variance > 0)) throw DegenerateDataError(test.name() + ": zero variance");
      return {r.z, one_sided_p(r.z, sided)};
    }
    case TestKind::MaxCombo:
    case TestKind::PhiStar: {
      ComboOptions options;
      options.mvn = mvn;
      options.critical_value = false;
      // alpha only matters for the critical value, which is skipped here
      const ComboResult r = max_combo_test(table, test.weights(), 0.05, mvn_rng, options);
      const double p = sided == Sidedness::TwoSided ? r.p_two_sided
                       : sided == Sidedness::Upper  ? r.p_one_sided_upper
                                                    : r.p_one_sided_lower;
      return {r.signed_t, p};
    }
    case TestKind::Projection: {
      require_two_sided(test, sided);
      const ProjectionResult r = projection_test(table, test.weights());
      return {r.s_n, r.p_value};
    }
    case TestKind::Renyi: {
      require_two_sided(test, sided);
      const RenyiResult r = renyi_test(table, Constant{});
      return {r.q, r.p_value};
    }
  }
  throw LookupError("unknown test kind");
}

bool rejects(const TestSpec& test, const EventTable& table, double alpha, Sidedness sided, const RngStream& mvn_rng) {
  if (!uses_mvn(test.kind)) return evaluate_test(test, table, sided, mvn_rng).p_value < alpha;

  const CovResult cov = cov_matrix(table, test.weights());
  const double t_max = cov.z_vec.cwiseAbs().maxCoeff();
  const double sign = cov.z_vec[0] < 0 ? -1.0 : 1.0;
  // One-sided p-values are half the two-sided one on the favoured side and
  // at least one half on the other.
  if (sided == Sidedness::Upper && !(sign > 0 && t_max > 0)) return false;
  if (sided == Sidedness::Lower && !(sign < 0 && t_max > 0)) return false;
  const double level = sided == Sidedness::TwoSided ? alpha : 2 * alpha;
  if (!(t_max > 0)) return false;

  const Eigen::Index m = cov.corr.rows();
  const Vector lo = Vector::Constant(m, -t_max), hi = Vector::Constant(m, t_max);
  MvnOptions coarse;
  coarse.abs_tol = 1e-3;
  const MvnEstimate first = mvn_rect_prob(cov.corr, lo, hi, mvn_rng, coarse);
  const double p_first = 1.0 - first.probability;
  if (std::abs(p_first - level) > 4 * first.std_error) return p_first < level;
  const MvnEstimate fine = mvn_rect_prob(cov.corr, lo, hi, mvn_rng, MvnOptions{});
  return 1.0 - fine.probability < level;
}

// ---------------------------------------------------------------------------
// Replications
// ---------------------------------------------------------------------------

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  RngStream s(master, index + 1);
  return s.engine()();
}

SimReport run_scenario(const Scenario& scn, const std::vector<TestSpec>& tests, const RunOptions& options) {
  validate(scn);
  if (options.reps < 1) throw DomainError("reps must be >= 1");
  if (tests.empty()) throw DomainError("no tests given");
  if (!(options.alpha > 0 && options.alpha < 0.5)) throw DomainError("alpha must lie in (0, 0.5)");
  if (options.sided != Sidedness::TwoSided)
    for (const TestSpec& t : tests)
      if (t.kind == TestKind::Projection || t.kind == TestKind::Renyi) require_two_sided(t, options.sided);

  const TrialGenerator generator(scn);
  const RngStream root(options.seed);
  const std::size_t n_tests = tests.size();

  struct Replication {
    std::vector<char> rejected;
    double censoring_g0 = 0, censoring_g1 = 0;
    int redraws = 0;
  };
  std::vector<Replication> results(static_cast<std::size_t>(options.reps));

  const auto replicate = [&](int r) {
    Replication& out = results[static_cast<std::size_t>(r)];
    const RngStream rep_stream = root.substream(static_cast<std::uint64_t>(r));
    for (int attempt = 0;; ++attempt) {
      if (attempt > kMaxRedraws) throw DegenerateDataError("replication kept producing degenerate data");
      RngStream trial_rng = rep_stream.substream(2 * static_cast<std::uint64_t>(attempt));
      const RngStream mvn_rng = rep_stream.substream(2 * static_cast<std::uint64_t>(attempt) + 1);
      const TrialData trial = generator.generate(trial_rng);
      try {
        const EventTable table = build_event_table(trial.subjects);
        out.rejected.assign(n_tests, 0);
        for (std::size_t k = 0; k < n_tests; ++k)
          out.rejected[k] = rejects(tests[k], table, options.alpha, options.sided, mvn_rng);
      } catch (const DegenerateDataError&) {
        ++out.redraws;
        continue;
      }
      out.censoring_g0 = trial.censoring_g0;
      out.censoring_g1 = trial.censoring_g1;
      return;
    }
  };

  int workers = options.threads > 0 ? options.threads : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, options.reps);
  if (workers == 1) {
    for (int r = 0; r < options.reps; ++r) replicate(r);
  } else {
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int r = next++; r < options.reps; r = next++) {
          try {
            replicate(r);
          } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = options.reps;
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  SimReport report;
  report.scenario = scn;
  report.reps = options.reps;
  report.seed = options.seed;
  report.alpha = options.alpha;
  report.sided = options.sided;
  for (const TestSpec& t : tests) report.tests.push_back(t.name());
  std::vector<long> counts(n_tests, 0);
  for (const Replication& rep : results) {
    for (std::size_t k = 0; k < n_tests; ++k) counts[k] += rep.rejected[k];
    report.censoring_g0 += rep.censoring_g0;
    report.censoring_g1 += rep.censoring_g1;
    report.regenerated += rep.redraws;
  }
  for (long c : counts) report.rejection_rate.push_back(static_cast<double>(c) / options.reps);
  report.censoring_g0 /= options.reps;
  report.censoring_g1 /= options.reps;
  return report;
}

std::vector<SimReport> run_grid(const std::vector<Scenario>& scenarios, const std::vector<TestSpec>& tests,
                                const RunOptions& options) {
  std::vector<SimReport> out;
  out.reserve(scenarios.size());
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    RunOptions o = options;
    o.seed = derive_seed(options.seed, i);
    out.push_back(run_scenario(scenarios[i], tests, o));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Power tables and ranking
// ---------------------------------------------------------------------------

std::vector<PowerRow> to_rows(const SimReport& report) {
  std::vector<PowerRow> rows;
  for (std::size_t k = 0; k < report.tests.size(); ++k) {
    PowerRow row;
    row.mechanism = report.scenario.mechanism;
    row.n_total = report.scenario.n_total;
    row.hazard_case = report.scenario.hazard_case;
    row.phi0 = report.censoring_g0;
    row.phi1 = report.censoring_g1;
    row.test = report.tests[k];
    row.rejection_rate = report.rejection_rate[k];
    row.reps = report.reps;
    row.seed = report.seed;
    row.beta = report.scenario.baseline.beta;
    row.event_fraction = report.scenario.mechanism == Mechanism::TypeII ? report.scenario.target_event_fraction : 1.0;
    rows.push_back(row);
  }
  return rows;
}

std::vector<PowerRow> to_rows(const std::vector<SimReport>& reports) {
  std::vector<PowerRow> rows;
  for (const SimReport& r : reports) {
    const auto part = to_rows(r);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  return rows;
}

std::vector<double> rank_scores(const std::vector<double>& powers) {
  std::vector<double> scores(powers.size());
  for (std::size_t i = 0; i < powers.size(); ++i) {
    double below = 0, tied = 0;
    for (std::size_t j = 0; j < powers.size(); ++j) {
      if (j == i) continue;
      if (powers[j] < powers[i]) below += 1;
      else if (powers[j] == powers[i]) tied += 1;
    }
    scores[i] = 1 + below + tied / 2;
  }
  return scores;
}

RankTable ranking_scores(const std::vector<PowerRow>& rows) {
  using Key = std::tuple<int, int, int, double, double>;
  RankTable table;
  std::vector<Key> order;
  std::map<Key, std::map<std::string, double>> cells;
  for (const PowerRow& row : rows) {
    if (std::find(table.tests.begin(), table.tests.end(), row.test) == table.tests.end()) table.tests.push_back(row.test);
    const Key key{static_cast<int>(row.mechanism), row.n_total, static_cast<int>(row.hazard_case), row.beta,
                  row.event_fraction};
    if (!cells.count(key)) order.push_back(key);
    if (!cells[key].emplace(row.test, row.rejection_rate).second)
      throw InputError("duplicate power entry for test " + row.test);
  }
  const std::size_t n = table.tests.size();
  table.crossing.assign(n, 0);
  table.total.assign(n, 0);
  for (const Key& key : order) {
    const auto hazard = static_cast<HazardCase>(std::get<2>(key));
    if (hazard == HazardCase::H) continue;
    const auto& cell = cells.at(key);
    std::vector<double> powers;
    for (const std::string& t : table.tests) {
      const auto it = cell.find(t);
      if (it == cell.end())
        throw InputError("scenario N=" + std::to_string(std::get<1>(key)) + " case " + to_string(hazard) +
                         " has no entry for test " + t);
      powers.push_back(std::round(it->second * 1000) / 1000);
    }
    const auto scores = rank_scores(powers);
    for (std::size_t k = 0; k < n; ++k) {
      table.total[k] += scores[k];
      if (is_crossing(hazard)) table.crossing[k] += scores[k];
    }
    ++table.total_scenarios;
    if (is_crossing(hazard)) ++table.crossing_scenarios;
  }
  return table;
}

// ---------------------------------------------------------------------------
// Built-in grids
// ---------------------------------------------------------------------------

std::vector<HazardCase> alternative_cases() {
  return {HazardCase::A, HazardCase::B, HazardCase::C, HazardCase::D, HazardCase::E, HazardCase::F, HazardCase::G};
}

std::vector<Scenario> type_one_grid(const std::vector<HazardCase>& cases) {
  std::vector<Scenario> out;
  for (double beta : kTypeOneBetas)
    for (int n : kSampleSizes)
      for (HazardCase c : cases) out.push_back(Scenario::type_one(n, beta, c));
  return out;
}

std::vector<Scenario> type_two_grid(const std::vector<HazardCase>& cases) {
  std::vector<Scenario> out;
  for (double phi : kTypeTwoCensoring)
    for (int n : kSampleSizes)
      for (HazardCase c : cases) out.push_back(Scenario::type_two(n, phi, c));
  return out;
}

std::vector<Scenario> sensitivity_scenarios() {
  std::vector<Scenario> out;
  for (double beta : kTypeOneBetas)
    for (HazardCase c : {HazardCase::A, HazardCase::B}) out.push_back(Scenario::type_one(240, beta, c));
  return out;
}

std::vector<SimReport> sensitivity_sweep(const std::vector<Scenario>& scenarios, const std::vector<double>& theta_grid,
                                         const RunOptions& options) {
  if (theta_grid.empty()) throw DomainError("empty theta grid");
  std::vector<TestSpec> tests;
  for (double theta : theta_grid) {
    if (!(theta > 0 && theta < 1)) throw DomainError("theta must lie in (0, 1)");
    tests.push_back({TestKind::PhiStar, {theta}});
  }
  return run_grid(scenarios, tests, options);
}

std::vector<SimReport> crossing_only_extension(const RunOptions& options) {
  return run_grid(type_one_grid({HazardCase::A, HazardCase::G, HazardCase::H}),
                  {TestSpec{TestKind::PhiStar, {0.2, 0.5, 0.8}}}, options);
}

bool is_table_id(int id) { return (id >= 1 && id <= 7) || id == 9; }

TableResult reproduce_table(int id, const RunOptions& options) {
  TableResult out;
  out.id = id;
  switch (id) {
    case 1: out.reports = run_grid(type_one_grid({HazardCase::H}), standard_tests(), options); break;
    case 2: out.reports = run_grid(type_two_grid({HazardCase::H}), standard_tests(), options); break;
    case 3:
    case 5: out.reports = run_grid(type_one_grid(alternative_cases()), standard_tests(), options); break;
    case 4:
    case 6: out.reports = run_grid(type_two_grid(alternative_cases()), standard_tests(), options); break;
    case 7: out.reports = sensitivity_sweep(sensitivity_scenarios(), kThetaGrid, options); break;
    case 9: out.reports = crossing_only_extension(options); break;
    default: throw LookupError("unknown table id " + std::to_string(id) + " (expected 1-7 or 9)");
  }
  if (id == 5 || id == 6) out.ranks = ranking_scores(to_rows(out.reports));
  return out;
}

}  // namespace maxlrt
