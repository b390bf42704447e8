#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "maxlrt/event_table.hpp"
#include "maxlrt/harness.hpp"

namespace maxlrt {

/// Subject records with header `time,event,group` (columns in any order);
/// event and group are 0 or 1. Throws InputError carrying the line number.
std::vector<Subject> read_subjects(std::istream& in);
std::vector<Subject> load_subjects(const std::string& path);
void write_subjects(std::ostream& out, const std::vector<Subject>& subjects);

/// Columns: mechanism,N,case,phi0,phi1,test,rejection_rate,reps,seed,beta,event_fraction.
/// Rates and censoring fractions are written with three decimals.
void write_power_csv(std::ostream& out, const std::vector<PowerRow>& rows);
/// Reads the format above; the trailing beta and event_fraction columns are
/// optional (without them scenarios are told apart by phi0).
std::vector<PowerRow> read_power_csv(std::istream& in);

/// Columns: score,<test...>; rows crossing and total.
void write_rank_csv(std::ostream& out, const RankTable& table);

}  // namespace maxlrt
