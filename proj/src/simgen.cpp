#include "maxlrt/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "maxlrt/errors.hpp"
#include "maxlrt/numerics.hpp"
#include "maxlrt/text.hpp"

namespace maxlrt {

Scenario Scenario::type_one(int n_total, double beta, HazardCase c, double alpha) {
  Scenario s;
  s.mechanism = Mechanism::TypeI;
  s.n_total = n_total;
  s.baseline = {alpha, beta};
  s.hazard_case = c;
  s.target_event_fraction = 1.0;
  s.accrual_weeks = 18;
  s.admin_end_weeks = 42;
  return s;
}

Scenario Scenario::type_two(int n_total, double censoring_rate, HazardCase c, double beta, double alpha) {
  Scenario s;
  s.mechanism = Mechanism::TypeII;
  s.n_total = n_total;
  s.baseline = {alpha, beta};
  s.hazard_case = c;
  s.target_event_fraction = 1.0 - censoring_rate;
  s.accrual_weeks = 24;
  return s;
}

void validate(const Scenario& scn) {
  if (scn.n_total < 2 || scn.n_total % 2 != 0) throw DomainError("n_total must be even and >= 2");
  if (!(scn.baseline.alpha > 0 && scn.baseline.beta > 0)) throw DomainError("baseline alpha and beta must be > 0");
  if (!(scn.accrual_weeks >= 0)) throw DomainError("accrual_weeks must be >= 0");
  if (scn.mechanism == Mechanism::TypeI) {
    if (!(scn.admin_end_weeks > scn.accrual_weeks)) throw DomainError("admin_end_weeks must exceed accrual_weeks");
  } else {
    if (!(scn.target_event_fraction > 0 && scn.target_event_fraction <= 1))
      throw DomainError("target_event_fraction must lie in (0, 1]");
    if (std::lround(scn.n_total * scn.target_event_fraction) < 1) throw DomainError("target event count is below 1");
  }
}

// ---------------------------------------------------------------------------
// Distributions
// ---------------------------------------------------------------------------

double baseline_time(double alpha, double beta, double u) {
  if (!(u > 0 && u < 1)) throw DomainError("baseline_time: u must lie in (0, 1)");
  return beta * std::pow((1.0 - u) / u, 1.0 / alpha);
}

double baseline_hazard(double alpha, double beta, double t) {
  const double z = std::pow(t / beta, alpha);
  return t > 0 ? (alpha / t) * z / (1.0 + z) : (alpha == 1 ? 1.0 / beta : (alpha < 1 ? INFINITY : 0.0));
}

double baseline_cumulative_hazard(double alpha, double beta, double t) {
  return std::log1p(std::pow(t / beta, alpha));
}

double hazard_ratio(HazardCase c, double t) {
  if (!(t >= 0)) throw DomainError("hazard_ratio: t must be >= 0");
  switch (c) {
    case HazardCase::A:
      if (t < 10) return 0.5;
      if (t <= 25) return (t - 10) / 15 + 0.5;
      return 1.5;
    case HazardCase::B:
      return 3 * std::exp(-0.3 * t) + 0.8;
    case HazardCase::C:
      return 1.5 / (1 + std::exp(-0.5 * (t - 20))) + 1;
    case HazardCase::D:
      return std::exp(0.03 * t);
    case HazardCase::E:
      return std::exp(1 / (0.2 * t + 1));
    case HazardCase::F:
      return t <= 40 ? 1 - (t - 50) * (t - 50) / 5000 : 0.98;
    case HazardCase::G:
      return 1.5;
    case HazardCase::H:
      return 1.0;
  }
  return 1.0;
}

// ---------------------------------------------------------------------------
// Group 1 inversion
// ---------------------------------------------------------------------------

namespace {

constexpr double kMaxWeeks = 1e6;
constexpr double kQuadTol = 1e-10;
constexpr double kMaxTarget = 760;

std::vector<double> knot_grid(HazardCase c) {
  std::vector<double> knots;
  for (double t = 0; t < 120; t += 0.5) knots.push_back(t);
  for (double t = 120; t < kMaxWeeks; t *= 1.1) knots.push_back(t);
  knots.push_back(kMaxWeeks);
  // kinks of the piecewise hazard ratios
  if (c == HazardCase::A) knots.insert(knots.end(), {10.0, 25.0});
  if (c == HazardCase::F) knots.push_back(40.0);
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
  return knots;
}

}  // namespace

Group1Sampler::Group1Sampler(HazardCase c, double alpha, double beta)
    : case_(c), alpha_(alpha), beta_(beta), knots_(knot_grid(c)) {
  if (!(alpha > 0 && beta > 0)) throw DomainError("baseline alpha and beta must be > 0");
  prefix_.reserve(knots_.size());
  prefix_.push_back(0);
  const auto f = [this](double t) { return integrand(t); };
  for (std::size_t k = 1; k < knots_.size(); ++k) {
    prefix_.push_back(prefix_[k - 1] + integrate(f, knots_[k - 1], knots_[k], kQuadTol));
    // -ln u never exceeds this for a double u > 0, so later knots are unreachable
    if (prefix_.back() > kMaxTarget) {
      knots_.resize(k + 1);
      break;
    }
  }
}

double Group1Sampler::integrand(double t) const { return hazard_ratio(case_, t) * baseline_hazard(alpha_, beta_, t); }

double Group1Sampler::cumulative_hazard(double t) const {
  if (!(t >= 0)) throw DomainError("cumulative_hazard: t must be >= 0");
  if (t > kMaxWeeks) throw NumericError("cumulative_hazard: t beyond the supported range");
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
  const std::size_t k = static_cast<std::size_t>(it - knots_.begin()) - 1;
  if (knots_[k] == t) return prefix_[k];
  return prefix_[k] + integrate([this](double s) { return integrand(s); }, knots_[k], t, kQuadTol);
}

double Group1Sampler::time(double u) const {
  if (!(u > 0 && u < 1)) throw DomainError("group1_time: u must lie in (0, 1)");
  if (case_ == HazardCase::H) return baseline_time(alpha_, beta_, u);
  const double target = -std::log(u);
  if (target >= prefix_.back()) throw NumericError("group1_time: event time beyond 1e6 weeks");

  // Knot interval that brackets the root, then a bracketing solve inside it.
  const auto it = std::upper_bound(prefix_.begin(), prefix_.end(), target);
  const std::size_t k = static_cast<std::size_t>(it - prefix_.begin()) - 1;
  const double base = prefix_[k];
  const double lo = knots_[k];
  const auto f = [this](double s) { return integrand(s); };
  const auto residual = [&](double t) { return base + integrate(f, lo, t, kQuadTol) - target; };
  return find_root(residual, lo, knots_[k + 1], 1e-9 * std::max(1.0, lo));
}

double group1_time(HazardCase c, double alpha, double beta, double u) { return Group1Sampler(c, alpha, beta).time(u); }

// ---------------------------------------------------------------------------
// Trials
// ---------------------------------------------------------------------------

TrialGenerator::TrialGenerator(const Scenario& scn)
    : scn_(scn), sampler_(scn.hazard_case, scn.baseline.alpha, scn.baseline.beta), horizon_hazard_(0) {
  validate(scn_);
  if (scn_.mechanism == Mechanism::TypeI) horizon_hazard_ = sampler_.cumulative_hazard(scn_.admin_end_weeks);
}

TrialData TrialGenerator::generate(RngStream& rng) const {
  const int n = scn_.n_total;
  const int per_group = n / 2;
  std::vector<double> entry(n), latent(n);
  std::vector<int> group(n);
  std::vector<bool> beyond_horizon(n, false);
  for (int i = 0; i < n; ++i) {
    group[i] = i < per_group ? 0 : 1;
    entry[i] = scn_.accrual_weeks * rng.uniform();
    const double u = rng.uniform();
    if (group[i] == 0) {
      latent[i] = baseline_time(scn_.baseline.alpha, scn_.baseline.beta, u);
    } else if (scn_.mechanism == Mechanism::TypeI && -std::log(u) > horizon_hazard_) {
      // Event after the administrative end: censored whatever its exact time.
      beyond_horizon[i] = true;
      latent[i] = scn_.admin_end_weeks;
    } else {
      latent[i] = sampler_.time(u);
    }
  }

  TrialData out;
  out.subjects.reserve(n);
  int censored[2] = {0, 0};
  if (scn_.mechanism == Mechanism::TypeI) {
    out.duration = scn_.admin_end_weeks;
    for (int i = 0; i < n; ++i) {
      const double cap = scn_.admin_end_weeks - entry[i];
      const bool event = !beyond_horizon[i] && latent[i] <= cap;
      out.subjects.push_back({event ? latent[i] : cap, event, group[i]});
      censored[group[i]] += !event;
    }
  } else {
    const int target = static_cast<int>(std::lround(n * scn_.target_event_fraction));
    std::vector<double> calendar(n);
    for (int i = 0; i < n; ++i) calendar[i] = entry[i] + latent[i];
    std::vector<double> sorted = calendar;
    std::nth_element(sorted.begin(), sorted.begin() + (target - 1), sorted.end());
    const double stop = sorted[target - 1];
    out.duration = stop;
    for (int i = 0; i < n; ++i) {
      if (calendar[i] <= stop) {
        out.subjects.push_back({latent[i], true, group[i]});
      } else {
        ++censored[group[i]];
        if (entry[i] >= stop) {
          ++out.dropped;
        } else {
          out.subjects.push_back({stop - entry[i], false, group[i]});
        }
      }
    }
  }
  out.censoring_g0 = static_cast<double>(censored[0]) / per_group;
  out.censoring_g1 = static_cast<double>(censored[1]) / per_group;
  return out;
}

TrialData generate_trial(const Scenario& scn, RngStream& rng) { return TrialGenerator(scn).generate(rng); }

// ---------------------------------------------------------------------------
// Text forms
// ---------------------------------------------------------------------------

std::string to_string(Mechanism m) { return m == Mechanism::TypeI ? "TypeI" : "TypeII"; }

std::string to_string(HazardCase c) { return std::string(1, static_cast<char>('A' + static_cast<int>(c))); }

Mechanism parse_mechanism(std::string_view s) {
  const std::string t = trim(s);
  if (t == "TypeI" || t == "I" || t == "1") return Mechanism::TypeI;
  if (t == "TypeII" || t == "II" || t == "2") return Mechanism::TypeII;
  throw InputError("unknown censoring mechanism: " + t);
}

HazardCase parse_hazard_case(std::string_view s) {
  const std::string t = trim(s);
  if (t.size() == 1 && t[0] >= 'A' && t[0] <= 'H') return static_cast<HazardCase>(t[0] - 'A');
  throw InputError("unknown hazard case: " + t);
}

std::string case_label(HazardCase c) {
  switch (c) {
    case HazardCase::A: return "Crossing 1";
    case HazardCase::B: return "Crossing 2";
    case HazardCase::C: return "Delayed Diverging";
    case HazardCase::D: return "Diverging";
    case HazardCase::E: return "Converging 1";
    case HazardCase::F: return "Converging 2";
    case HazardCase::G: return "Constant";
    case HazardCase::H: return "Null";
  }
  return "";
}

bool is_crossing(HazardCase c) { return c == HazardCase::A || c == HazardCase::B; }

Scenario parse_scenario(std::string_view text) {
  Scenario scn;
  bool accrual_set = false;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InputError("expected key = value", line_no);
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    const auto number = [&]() {
      const auto v = parse_double(value);
      if (!v) throw InputError("invalid number for " + key + ": " + value, line_no);
      return *v;
    };
    try {
      if (key == "mechanism") {
        scn.mechanism = parse_mechanism(value);
      } else if (key == "n_total") {
        scn.n_total = static_cast<int>(number());
      } else if (key == "alpha") {
        scn.baseline.alpha = number();
      } else if (key == "beta") {
        scn.baseline.beta = number();
      } else if (key == "hazard_case") {
        scn.hazard_case = parse_hazard_case(value);
      } else if (key == "target_event_fraction") {
        scn.target_event_fraction = number();
      } else if (key == "censoring_rate") {
        scn.target_event_fraction = 1.0 - number();
      } else if (key == "accrual_weeks") {
        scn.accrual_weeks = number();
        accrual_set = true;
      } else if (key == "admin_end_weeks") {
        scn.admin_end_weeks = number();
      } else {
        throw InputError("unknown key: " + key, line_no);
      }
    } catch (const InputError& e) {
      if (e.line() != 0) throw;
      throw InputError(e.what(), line_no);
    }
  }
  if (!accrual_set) scn.accrual_weeks = scn.mechanism == Mechanism::TypeI ? 18 : 24;
  try {
    validate(scn);
  } catch (const DomainError& e) {
    throw InputError(std::string("invalid scenario: ") + e.what());
  }
  return scn;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open scenario file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

std::string format_scenario(const Scenario& scn) {
  std::ostringstream out;
  out << "mechanism = " << to_string(scn.mechanism) << "\n"
      << "n_total = " << scn.n_total << "\n"
      << "alpha = " << scn.baseline.alpha << "\n"
      << "beta = " << scn.baseline.beta << "\n"
      << "hazard_case = " << to_string(scn.hazard_case) << "\n";
  if (scn.mechanism == Mechanism::TypeII) out << "target_event_fraction = " << scn.target_event_fraction << "\n";
  out << "accrual_weeks = " << scn.accrual_weeks << "\n";
  if (scn.mechanism == Mechanism::TypeI) out << "admin_end_weeks = " << scn.admin_end_weeks << "\n";
  return out.str();
}

}  // namespace maxlrt
