#include "maxlrt/csv_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>

#include "maxlrt/errors.hpp"
#include "maxlrt/text.hpp"

namespace maxlrt {
namespace {

struct Header {
  std::map<std::string, std::size_t> index;
  std::size_t width = 0;

  std::size_t at(const std::string& name, std::size_t line) const {
    const auto it = index.find(name);
    if (it == index.end()) throw InputError("missing column '" + name + "'", line);
    return it->second;
  }
  bool has(const std::string& name) const { return index.count(name) > 0; }
};

Header read_header(std::istream& in, std::size_t& line_no) {
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    Header h;
    const auto fields = split(line, ',');
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (!h.index.emplace(fields[i], i).second) throw InputError("duplicate column '" + fields[i] + "'", line_no);
    }
    h.width = fields.size();
    return h;
  }
  throw InputError("empty input: expected a header line", line_no == 0 ? 1 : line_no);
}

double number_field(const std::vector<std::string>& f, std::size_t col, const char* what, std::size_t line) {
  const auto v = parse_double(f[col]);
  if (!v || !std::isfinite(*v)) throw InputError(std::string("invalid ") + what + " '" + f[col] + "'", line);
  return *v;
}

int binary_field(const std::vector<std::string>& f, std::size_t col, const char* what, std::size_t line) {
  const auto v = parse_long(f[col]);
  if (!v || (*v != 0 && *v != 1)) throw InputError(std::string(what) + " must be 0 or 1, got '" + f[col] + "'", line);
  return static_cast<int>(*v);
}

}  // namespace

std::vector<Subject> read_subjects(std::istream& in) {
  std::size_t line_no = 0;
  const Header h = read_header(in, line_no);
  const std::size_t c_time = h.at("time", line_no), c_event = h.at("event", line_no), c_group = h.at("group", line_no);

  std::vector<Subject> out;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != h.width)
      throw InputError("expected " + std::to_string(h.width) + " fields, got " + std::to_string(f.size()), line_no);
    Subject s;
    s.time = number_field(f, c_time, "time", line_no);
    if (s.time < 0) throw InputError("time must be >= 0", line_no);
    s.event = binary_field(f, c_event, "event", line_no) == 1;
    s.group = binary_field(f, c_group, "group", line_no);
    out.push_back(s);
  }
  if (out.empty()) throw InputError("no data rows", line_no);
  return out;
}

std::vector<Subject> load_subjects(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  return read_subjects(in);
}

void write_subjects(std::ostream& out, const std::vector<Subject>& subjects) {
  out << "time,event,group\n" << std::setprecision(17);
  for (const Subject& s : subjects) out << s.time << ',' << (s.event ? 1 : 0) << ',' << s.group << '\n';
}

void write_power_csv(std::ostream& out, const std::vector<PowerRow>& rows) {
  out << "mechanism,N,case,phi0,phi1,test,rejection_rate,reps,seed,beta,event_fraction\n";
  for (const PowerRow& r : rows) {
    out << to_string(r.mechanism) << ',' << r.n_total << ',' << to_string(r.hazard_case) << ',' << std::fixed
        << std::setprecision(3) << r.phi0 << ',' << r.phi1 << ',' << r.test << ',' << r.rejection_rate << ','
        << r.reps << ',' << r.seed << ',' << std::defaultfloat << std::setprecision(10) << r.beta << ','
        << r.event_fraction << '\n';
  }
}

std::vector<PowerRow> read_power_csv(std::istream& in) {
  std::size_t line_no = 0;
  const Header h = read_header(in, line_no);
  const std::size_t c_mech = h.at("mechanism", line_no), c_n = h.at("N", line_no), c_case = h.at("case", line_no),
                    c_phi0 = h.at("phi0", line_no), c_phi1 = h.at("phi1", line_no), c_test = h.at("test", line_no),
                    c_rate = h.at("rejection_rate", line_no), c_reps = h.at("reps", line_no),
                    c_seed = h.at("seed", line_no);
  const bool has_beta = h.has("beta"), has_fraction = h.has("event_fraction");

  std::vector<PowerRow> rows;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    // test names such as phi-star(0.2,0.5,0.8) contain commas; rejoin them
    std::vector<std::string> raw = split(line, ',');
    std::vector<std::string> f;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      std::string field = raw[i];
      while (std::count(field.begin(), field.end(), '(') > std::count(field.begin(), field.end(), ')') &&
             i + 1 < raw.size())
        field += "," + raw[++i];
      f.push_back(field);
    }
    if (f.size() != h.width)
      throw InputError("expected " + std::to_string(h.width) + " fields, got " + std::to_string(f.size()), line_no);
    PowerRow r;
    try {
      r.mechanism = parse_mechanism(f[c_mech]);
      r.hazard_case = parse_hazard_case(f[c_case]);
    } catch (const InputError& e) {
      throw InputError(e.what(), line_no);
    }
    const auto n = parse_long(f[c_n]);
    if (!n || *n < 2) throw InputError("invalid N '" + f[c_n] + "'", line_no);
    r.n_total = static_cast<int>(*n);
    r.phi0 = number_field(f, c_phi0, "phi0", line_no);
    r.phi1 = number_field(f, c_phi1, "phi1", line_no);
    r.test = f[c_test];
    if (r.test.empty()) throw InputError("empty test name", line_no);
    r.rejection_rate = number_field(f, c_rate, "rejection_rate", line_no);
    if (r.rejection_rate < 0 || r.rejection_rate > 1) throw InputError("rejection_rate must lie in [0, 1]", line_no);
    const auto reps = parse_long(f[c_reps]);
    if (!reps || *reps < 1) throw InputError("invalid reps '" + f[c_reps] + "'", line_no);
    r.reps = static_cast<int>(*reps);
    try {
      std::size_t used = 0;
      r.seed = std::stoull(f[c_seed], &used);
      if (used != f[c_seed].size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw InputError("invalid seed '" + f[c_seed] + "'", line_no);
    }
    r.beta = has_beta ? number_field(f, h.at("beta", line_no), "beta", line_no) : r.phi0;
    r.event_fraction = has_fraction ? number_field(f, h.at("event_fraction", line_no), "event_fraction", line_no) : 1;
    rows.push_back(r);
  }
  if (rows.empty()) throw InputError("no data rows", line_no);
  return rows;
}

void write_rank_csv(std::ostream& out, const RankTable& table) {
  out << "score";
  for (const std::string& t : table.tests) out << ',' << t;
  out << '\n' << std::defaultfloat << std::setprecision(10);
  out << "crossing";
  for (double v : table.crossing) out << ',' << v;
  out << "\ntotal";
  for (double v : table.total) out << ',' << v;
  out << '\n';
}

}  // namespace maxlrt
