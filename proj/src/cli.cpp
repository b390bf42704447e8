#include "maxlrt/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "maxlrt/csv_io.hpp"
#include "maxlrt/errors.hpp"
#include "maxlrt/harness.hpp"
#include "maxlrt/text.hpp"

namespace maxlrt {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInput = 2;
constexpr int kExitDegenerate = 3;

struct CommonFlags {
  double alpha = 0;  // 0: default for the sidedness
  std::string one_sided;
  int reps = 2000;
  std::uint64_t seed = 1;
  int threads = 0;
  std::string out;
};

Sidedness sidedness_of(const CommonFlags& f) {
  if (f.one_sided.empty()) return Sidedness::TwoSided;
  const Sidedness s = parse_sidedness(f.one_sided);
  if (s == Sidedness::TwoSided) throw InputError("--one-sided expects upper or lower");
  return s;
}

double alpha_of(const CommonFlags& f, Sidedness s) {
  const double a = f.alpha > 0 ? f.alpha : (s == Sidedness::TwoSided ? 0.05 : 0.025);
  if (!(a > 0 && a < 0.5)) throw DomainError("--alpha must lie in (0, 0.5)");
  return a;
}

RunOptions run_options(const CommonFlags& f) {
  RunOptions o;
  o.sided = sidedness_of(f);
  o.alpha = alpha_of(f, o.sided);
  o.reps = f.reps;
  o.seed = f.seed;
  o.threads = f.threads;
  return o;
}

std::vector<double> parse_theta_list(const std::string& s) {
  std::vector<double> out;
  for (const std::string& field : split(s, ',')) {
    const auto v = parse_double(field);
    if (!v || !(*v > 0 && *v < 1)) throw InputError("invalid theta '" + field + "'");
    out.push_back(*v);
  }
  if (out.empty()) throw InputError("empty --theta list");
  return out;
}

// Writes to --out when given, otherwise to the console stream.
template <class Fn>
void emit(const std::string& path, std::ostream& console, Fn&& write) {
  if (path.empty()) {
    write(console);
    return;
  }
  std::ofstream file(path);
  if (!file) throw InputError("cannot write " + path);
  write(file);
  if (!file) throw InputError("write failed: " + path);
}

std::string fixed(double v, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

std::string scenario_label(const Scenario& s) {
  std::ostringstream l;
  l << to_string(s.mechanism) << " N=" << s.n_total << " beta=" << s.baseline.beta;
  if (s.mechanism == Mechanism::TypeII) l << " cens=" << fixed(1 - s.target_event_fraction, 3);
  l << ' ' << to_string(s.hazard_case);
  return l.str();
}

void print_grid(std::ostream& out, const std::vector<SimReport>& reports) {
  if (reports.empty()) return;
  out << std::left << std::setw(34) << "scenario" << std::right << std::setw(7) << "phi0" << std::setw(7) << "phi1";
  for (const std::string& t : reports.front().tests) out << std::setw(std::max<int>(10, t.size() + 2)) << t;
  out << '\n';
  for (const SimReport& r : reports) {
    out << std::left << std::setw(34) << scenario_label(r.scenario) << std::right << std::setw(7)
        << fixed(r.censoring_g0, 3) << std::setw(7) << fixed(r.censoring_g1, 3);
    for (std::size_t k = 0; k < r.tests.size(); ++k)
      out << std::setw(std::max<int>(10, r.tests[k].size() + 2)) << fixed(100 * r.rejection_rate[k], 1);
    out << '\n';
  }
}

void print_ranks(std::ostream& out, const RankTable& t) {
  out << std::left << std::setw(10) << "score" << std::right;
  for (const std::string& name : t.tests) out << std::setw(std::max<int>(10, name.size() + 2)) << name;
  out << '\n';
  const auto row = [&](const char* label, const std::vector<double>& v, int n) {
    out << std::left << std::setw(10) << label << std::right;
    for (std::size_t k = 0; k < v.size(); ++k)
      out << std::setw(std::max<int>(10, t.tests[k].size() + 2)) << fixed(v[k], 1);
    out << "   (" << n << " scenarios)\n";
  };
  row("crossing", t.crossing, t.crossing_scenarios);
  row("total", t.total, t.total_scenarios);
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

struct TestFlags {
  std::string input;
  std::string weights;
  std::string theta = "0.25,0.5,0.75";
};

int cmd_test(const TestFlags& tf, const CommonFlags& f, std::ostream& out, std::ostream& err) {
  const Sidedness sided = sidedness_of(f);
  const double alpha = alpha_of(f, sided);
  const std::vector<Subject> subjects = load_subjects(tf.input);
  int n0 = 0, n1 = 0, events = 0;
  for (const Subject& s : subjects) {
    (s.group == 0 ? n0 : n1) += 1;
    events += s.event;
  }
  if (n0 == 0 || n1 == 0) throw DegenerateDataError("both groups must be present");
  if (events == 0) throw DegenerateDataError("no events observed");
  const EventTable table = build_event_table(subjects);

  struct Line {
    std::string name;
    double statistic;
    double p_value;
  };
  std::vector<Line> lines;
  const RngStream mvn_rng(f.seed);

  if (!tf.weights.empty()) {
    const WeightSet set = builtin_set(tf.weights);
    ComboOptions options;
    options.critical_value = false;
    const ComboResult r = max_combo_test(table, set, alpha, mvn_rng, options);
    const double p = sided == Sidedness::TwoSided ? r.p_two_sided
                     : sided == Sidedness::Upper  ? r.p_one_sided_upper
                                                  : r.p_one_sided_lower;
    lines.push_back({tf.weights, r.signed_t, p});
  } else {
    std::vector<TestSpec> tests = {parse_test("logrank"), parse_test("maxc"), parse_test("projt")};
    for (double theta : parse_theta_list(tf.theta)) tests.push_back(TestSpec{TestKind::PhiStar, {theta}});
    tests.push_back(parse_test("renyi"));
    for (const TestSpec& t : tests) {
      if (sided != Sidedness::TwoSided && (t.kind == TestKind::Projection || t.kind == TestKind::Renyi)) {
        err << "note: " << t.name() << " is two-sided only; skipped\n";
        continue;
      }
      const TestOutcome o = evaluate_test(t, table, sided, mvn_rng);
      lines.push_back({t.name(), o.statistic, o.p_value});
    }
  }

  out << "subjects " << subjects.size() << " (group 0: " << n0 << ", group 1: " << n1 << "), events " << events
      << ", " << to_string(sided) << ", alpha " << alpha << '\n';
  out << std::left << std::setw(24) << "test" << std::right << std::setw(12) << "statistic" << std::setw(10)
      << "p_value" << std::setw(8) << "reject" << '\n';
  for (const Line& l : lines)
    out << std::left << std::setw(24) << l.name << std::right << std::setw(12) << fixed(l.statistic, 4)
        << std::setw(10) << fixed(l.p_value, 4) << std::setw(8) << (l.p_value < alpha ? "yes" : "no") << '\n';

  if (!f.out.empty()) {
    emit(f.out, out, [&](std::ostream& o) {
      o << "test,statistic,p_value\n" << std::setprecision(17);
      for (const Line& l : lines) o << l.name << ',' << l.statistic << ',' << l.p_value << '\n';
    });
  }
  return kExitOk;
}

struct SimulateFlags {
  std::string scenario;
  std::string tests = "logrank,fh11,maxc,phi-star(0.5),projt,renyi";
};

int cmd_simulate(const SimulateFlags& sf, const CommonFlags& f, std::ostream& out) {
  const Scenario scn = load_scenario(sf.scenario);
  const SimReport report = run_scenario(scn, parse_tests(sf.tests), run_options(f));
  if (f.out.empty()) {
    write_power_csv(out, to_rows(report));
  } else {
    emit(f.out, out, [&](std::ostream& o) { write_power_csv(o, to_rows(report)); });
    print_grid(out, {report});
  }
  return kExitOk;
}

int cmd_reproduce(int id, const CommonFlags& f, std::ostream& out, std::ostream& err) {
  if (!is_table_id(id)) {
    err << "error: unknown table id " << id << " (expected 1, 2, 3, 4, 5, 6, 7 or 9)\n";
    return kExitInput;
  }
  const TableResult result = reproduce_table(id, run_options(f));
  const bool ranks = id == 5 || id == 6;
  const auto write = [&](std::ostream& o) {
    if (ranks)
      write_rank_csv(o, result.ranks);
    else
      write_power_csv(o, to_rows(result.reports));
  };
  if (f.out.empty()) {
    write(out);
  } else {
    emit(f.out, out, write);
    if (ranks)
      print_ranks(out, result.ranks);
    else
      print_grid(out, result.reports);
  }
  return kExitOk;
}

int cmd_rank(const std::string& input, const CommonFlags& f, std::ostream& out) {
  std::ifstream in(input);
  if (!in) throw InputError("cannot open " + input);
  const RankTable table = ranking_scores(read_power_csv(in));
  if (f.out.empty()) {
    write_rank_csv(out, table);
  } else {
    emit(f.out, out, [&](std::ostream& o) { write_rank_csv(o, table); });
    print_ranks(out, table);
  }
  return kExitOk;
}

void add_common(CLI::App* cmd, CommonFlags& f, bool simulation) {
  cmd->add_option("--alpha", f.alpha, "Significance level (default 0.05 two-sided, 0.025 one-sided)");
  cmd->add_option("--one-sided", f.one_sided, "One-sided alternative: upper (higher hazard in group 1) or lower");
  cmd->add_option("--seed", f.seed, "Random seed")->capture_default_str();
  cmd->add_option("--out", f.out, "Output CSV path");
  if (simulation) {
    cmd->add_option("--reps", f.reps, "Replications per scenario")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--threads", f.threads, "Worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Maximum weighted logrank tests and their simulation harness", "maxlrt"};
  app.require_subcommand(1);

  CommonFlags common;
  TestFlags test_flags;
  SimulateFlags sim_flags;
  int table_id = 0;
  std::string rank_input;

  CLI::App* test = app.add_subcommand("test", "Run the tests on a time,event,group CSV");
  test->add_option("--input", test_flags.input, "Subject CSV")->required();
  test->add_option("--weights", test_flags.weights, "Run only this weight set, e.g. maxcombo or phi-star(0.5)");
  test->add_option("--theta", test_flags.theta, "Crossing points of the phi-star tests")->capture_default_str();
  add_common(test, common, false);

  CLI::App* simulate = app.add_subcommand("simulate", "Simulate rejection rates for a scenario file");
  simulate->add_option("--scenario", sim_flags.scenario, "Scenario file (key = value lines)")->required();
  simulate->add_option("--tests", sim_flags.tests, "Comma-separated tests")->capture_default_str();
  add_common(simulate, common, true);

  CLI::App* reproduce = app.add_subcommand("reproduce", "Reproduce a built-in table: 1-7 or 9");
  reproduce->add_option("--table", table_id, "Table id")->required();
  add_common(reproduce, common, true);

  CLI::App* rank = app.add_subcommand("rank", "Ranking scores from a power CSV");
  rank->add_option("--input", rank_input, "Power CSV")->required();
  rank->add_option("--out", common.out, "Output CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*test) return cmd_test(test_flags, common, out, err);
    if (*simulate) return cmd_simulate(sim_flags, common, out);
    if (*reproduce) return cmd_reproduce(table_id, common, out, err);
    if (*rank) return cmd_rank(rank_input, common, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const LookupError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const DegenerateDataError& e) {
    err << "error: degenerate data: " << e.what() << '\n';
    return kExitDegenerate;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}

}  // namespace maxlrt
