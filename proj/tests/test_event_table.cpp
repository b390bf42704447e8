#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "maxlrt/errors.hpp"
#include "maxlrt/event_table.hpp"
#include "maxlrt/rng.hpp"

using namespace maxlrt;
using Catch::Approx;

namespace {

std::vector<Subject> four_subjects() { return {{1, true, 0}, {2, true, 1}, {3, false, 0}, {4, true, 1}}; }

}  // namespace

TEST_CASE("Hand-tabulated four-subject example") {
  const auto s = four_subjects();
  const EventTable t = build_event_table(s);
  REQUIRE(t.rows() == 3);
  CHECK(t.time[0] == 1);
  CHECK(t.time[1] == 2);
  CHECK(t.time[2] == 4);
  const double expected[3][4] = {{2, 2, 1, 0}, {1, 2, 0, 1}, {0, 1, 0, 1}};
  for (int j = 0; j < 3; ++j) {
    CHECK(t.y0[j] == expected[j][0]);
    CHECK(t.y1[j] == expected[j][1]);
    CHECK(t.d0[j] == expected[j][2]);
    CHECK(t.d1[j] == expected[j][3]);
  }
  CHECK(t.n0 == 2);
  CHECK(t.n1 == 2);
  // 1 - (1 - 1/4)(1 - 1/3): the censoring at t=3 shrinks the risk set to one
  CHECK(t.f_minus[0] == 0);
  CHECK(t.f_minus[1] == Approx(0.25).margin(1e-15));
  CHECK(t.f_minus[2] == Approx(0.5).margin(1e-15));
  CHECK(t.usable()[2] == 0);
  CHECK(t.usable()[0] == 1);

  const auto [c0, c1] = censoring_rates(s);
  CHECK(c0 == 0.5);
  CHECK(c1 == 0.0);
}

TEST_CASE("Censored ties stay in the risk set") {
  const std::vector<Subject> s = {{2, true, 0}, {2, false, 1}, {3, true, 1}, {1, false, 0}};
  const EventTable t = build_event_table(s);
  REQUIRE(t.rows() == 2);
  CHECK(t.y0[0] == 1);
  CHECK(t.y1[0] == 2);
  CHECK(t.d0[0] == 1);
}

TEST_CASE("Duplicating the data doubles every count") {
  auto s = four_subjects();
  const EventTable once = build_event_table(s);
  const auto copy = s;
  s.insert(s.end(), copy.begin(), copy.end());
  const EventTable twice = build_event_table(s);
  REQUIRE(twice.rows() == once.rows());
  CHECK((twice.time == once.time).all());
  CHECK((twice.y0 == 2 * once.y0).all());
  CHECK((twice.y1 == 2 * once.y1).all());
  CHECK((twice.d0 == 2 * once.d0).all());
  CHECK((twice.d1 == 2 * once.d1).all());
  CHECK(((twice.f_minus - once.f_minus).abs() < 1e-15).all());
}

TEST_CASE("Uncensored distinct times give the empirical CDF") {
  RngStream rng(4);
  std::vector<Subject> s;
  const int n = 37;
  for (int i = 0; i < n; ++i) s.push_back({rng.uniform() * 100, true, i % 2});
  const EventTable t = build_event_table(s);
  REQUIRE(t.rows() == n);
  for (int j = 0; j < n; ++j) CHECK(t.f_minus[j] == Approx(static_cast<double>(j) / n).margin(1e-14));
}

TEST_CASE("Table invariants on random data") {
  RngStream rng(12);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<Subject> s;
    const int n = 5 + rep;
    for (int i = 0; i < n; ++i) s.push_back({std::floor(rng.uniform() * 12), rng.uniform() < 0.7, i % 2});
    s.push_back({20, true, 0});
    const EventTable t = build_event_table(s);
    for (Eigen::Index j = 0; j < t.rows(); ++j) {
      CHECK(t.y()[j] >= t.d()[j]);
      CHECK(t.d()[j] >= 1);
      CHECK(t.f_minus[j] >= 0);
      CHECK(t.f_minus[j] < 1);
      if (j > 0) {
        CHECK(t.time[j] > t.time[j - 1]);
        CHECK(t.y0[j] <= t.y0[j - 1]);
        CHECK(t.y1[j] <= t.y1[j - 1]);
        CHECK(t.f_minus[j] >= t.f_minus[j - 1]);
      }
    }
    CHECK(t.f_minus[0] == 0);
  }
}

TEST_CASE("Invalid data") {
  const std::vector<Subject> censored = {{1, false, 0}, {2, false, 1}};
  CHECK_THROWS_AS(build_event_table(censored), DegenerateDataError);
  const std::vector<Subject> one_group = {{1, true, 0}, {2, true, 0}};
  CHECK_THROWS_AS(build_event_table(one_group), DomainError);
  const std::vector<Subject> bad_group = {{1, true, 0}, {2, true, 2}};
  CHECK_THROWS_AS(build_event_table(bad_group), DomainError);
  const std::vector<Subject> negative = {{-1, true, 0}, {2, true, 1}};
  CHECK_THROWS_AS(build_event_table(negative), DomainError);
  const std::vector<Subject> nan_time = {{NAN, true, 0}, {2, true, 1}};
  CHECK_THROWS_AS(build_event_table(nan_time), DomainError);
  CHECK_THROWS_AS(censoring_rates(one_group), DomainError);
}
