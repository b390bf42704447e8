#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "maxlrt/cli.hpp"
#include "maxlrt/csv_io.hpp"
#include "maxlrt/errors.hpp"
#include "maxlrt/harness.hpp"

using namespace maxlrt;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "maxlrt");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path temp_file(const std::string& name, const std::string& content) {
  const fs::path p = fs::temp_directory_path() / ("maxlrt_cli_" + name);
  std::ofstream(p) << content;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string sample_csv(bool duplicated) {
  std::ostringstream s;
  s << "time,event,group\n";
  RngStream rng(8);
  for (int i = 0; i < 60; ++i) {
    const double t = -std::log(rng.uniform()) * (i % 2 ? 1.6 : 1.0);
    const int e = rng.uniform() < 0.8;
    if (duplicated) {
      s << t << ',' << e << ",0\n" << t << ',' << e << ",1\n";
    } else {
      s << t << ',' << e << ',' << i % 2 << '\n';
    }
  }
  return s.str();
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    rows.push_back(f);
  }
  return rows;
}

}  // namespace

TEST_CASE("Subject CSV parsing") {
  std::istringstream ok("group,time,event\n0,1.5,1\n\n1,2.0,0\r\n");
  const auto s = read_subjects(ok);
  REQUIRE(s.size() == 2);
  CHECK(s[0].time == 1.5);
  CHECK(s[0].event);
  CHECK(s[1].group == 1);
  CHECK_FALSE(s[1].event);

  const auto line_of = [](const std::string& text) -> std::size_t {
    std::istringstream in(text);
    try {
      read_subjects(in);
    } catch (const InputError& e) {
      return e.line();
    }
    return 0;
  };
  CHECK(line_of("time,event,group\n1,1,0\n2,1,2\n") == 3);
  CHECK(line_of("time,event,group\n1,1,0\nx,1,1\n") == 3);
  CHECK(line_of("time,event,group\n-1,1,0\n") == 2);
  CHECK(line_of("time,event,group\n1,1\n") == 2);
  CHECK(line_of("time,status,group\n1,1,0\n") == 1);
  CHECK(line_of("time,event,group\n") == 1);
}

TEST_CASE("test command reports the seven tests") {
  const fs::path input = temp_file("data.csv", sample_csv(false));
  const Run r = cli({"test", "--input", input.string(), "--seed", "3"});
  REQUIRE(r.code == 0);
  for (const char* name : {"logrank", "maxc", "projt", "phi-star(0.25)", "phi-star(0.5)", "phi-star(0.75)", "renyi"})
    CHECK(r.out.find(name) != std::string::npos);

  // bit-for-bit reproducible under a fixed seed
  CHECK(cli({"test", "--input", input.string(), "--seed", "3"}).out == r.out);

  const fs::path out = fs::temp_directory_path() / "maxlrt_cli_test_out.csv";
  REQUIRE(cli({"test", "--input", input.string(), "--theta", "0.4", "--out", out.string()}).code == 0);
  const auto rows = csv_rows(slurp(out));
  REQUIRE(rows.size() == 6);
  CHECK(rows[0] == std::vector<std::string>{"test", "statistic", "p_value"});
  CHECK(rows[4][0] == "phi-star(0.4)");
}

TEST_CASE("test command on identical groups gives p-values near one") {
  const fs::path input = temp_file("dup.csv", sample_csv(true));
  const fs::path out = fs::temp_directory_path() / "maxlrt_cli_dup_out.csv";
  const Run r = cli({"test", "--input", input.string(), "--out", out.string()});
  REQUIRE(r.code == 0);
  const auto rows = csv_rows(slurp(out));
  REQUIRE(rows.size() == 8);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    INFO(rows[i][0]);
    CHECK(std::abs(std::stod(rows[i][1])) <= 1e-9);
    CHECK(std::stod(rows[i][2]) >= 1 - 1e-3);
  }
}

TEST_CASE("test command options") {
  const fs::path input = temp_file("data2.csv", sample_csv(false));
  const Run one = cli({"test", "--input", input.string(), "--weights", "maxcombo", "--one-sided", "upper"});
  REQUIRE(one.code == 0);
  CHECK(one.out.find("maxcombo") != std::string::npos);
  CHECK(one.out.find("alpha 0.025") != std::string::npos);

  const Run skipped = cli({"test", "--input", input.string(), "--one-sided", "lower"});
  REQUIRE(skipped.code == 0);
  CHECK(skipped.out.find("renyi") == std::string::npos);
  CHECK(skipped.err.find("two-sided only") != std::string::npos);

  CHECK(cli({"test", "--input", input.string(), "--weights", "nonsense"}).code == 2);
  CHECK(cli({"test", "--input", input.string(), "--theta", "1.5"}).code == 2);
  CHECK(cli({"test", "--input", input.string(), "--alpha", "0.7"}).code == 1);
  CHECK(cli({"test"}).code != 0);
}

TEST_CASE("Exit codes for bad data") {
  const fs::path bad = temp_file("bad.csv", "time,event,group\n1,1,0\n2,yes,1\n");
  const Run r = cli({"test", "--input", bad.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("line 3") != std::string::npos);

  CHECK(cli({"test", "--input", "/nonexistent/file.csv"}).code == 2);

  const fs::path one_group = temp_file("onegroup.csv", "time,event,group\n1,1,0\n2,1,0\n");
  CHECK(cli({"test", "--input", one_group.string()}).code == 3);

  const fs::path no_overlap = temp_file("nooverlap.csv", "time,event,group\n0.5,0,0\n1,1,1\n2,1,1\n");
  CHECK(cli({"test", "--input", no_overlap.string()}).code == 3);
}

TEST_CASE("simulate then rank reproduces the ranking") {
  const fs::path scenario = temp_file("scn.txt",
                                      "# crossing hazards\n"
                                      "mechanism = TypeI\n"
                                      "n_total = 60\n"
                                      "beta = 15\n"
                                      "hazard_case = A\n");
  const fs::path out = fs::temp_directory_path() / "maxlrt_cli_sim.csv";
  const Run sim = cli({"simulate", "--scenario", scenario.string(), "--reps", "40", "--seed", "4", "--out",
                       out.string(), "--threads", "2"});
  REQUIRE(sim.code == 0);
  CHECK(sim.out.find("TypeI N=60") != std::string::npos);

  std::ifstream in(out);
  const auto rows = read_power_csv(in);
  REQUIRE(rows.size() == 6);
  const RankTable direct = ranking_scores(rows);

  const Run rank = cli({"rank", "--input", out.string()});
  REQUIRE(rank.code == 0);
  std::ostringstream expected;
  write_rank_csv(expected, direct);
  CHECK(rank.out == expected.str());

  // same seed, same file
  const Run again = cli({"simulate", "--scenario", scenario.string(), "--reps", "40", "--seed", "4"});
  CHECK(again.out == slurp(out));

  const fs::path broken = temp_file("broken_scn.txt", "mechanism = TypeIII\n");
  CHECK(cli({"simulate", "--scenario", broken.string()}).code == 2);
}

TEST_CASE("reproduce rejects unknown tables") {
  const Run r = cli({"reproduce", "--table", "8"});
  CHECK(r.code == 2);
  CHECK(r.err.find("unknown table") != std::string::npos);
  CHECK(cli({"reproduce", "--table", "0"}).code == 2);
}

TEST_CASE("rank rejects malformed power files") {
  const fs::path bad = temp_file("bad_power.csv",
                                 "mechanism,N,case,phi0,phi1,test,rejection_rate,reps,seed\n"
                                 "TypeI,240,A,0.18,0.2,logrank,1.7,2000,1\n");
  const Run r = cli({"rank", "--input", bad.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("line 2") != std::string::npos);
}
