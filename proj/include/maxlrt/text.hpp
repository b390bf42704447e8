#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace maxlrt {

std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
/// Whole-field parse; nullopt on trailing garbage or an empty field.
std::optional<double> parse_double(std::string_view s);
std::optional<long> parse_long(std::string_view s);

}  // namespace maxlrt
