#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace aeq::io {

// Shortest-free, locale-independent formatting with 17 significant digits.
std::string fmt17(double v);

// Parses a double written by fmt17 (or any C-locale decimal).
double parse_double(std::string_view s);

std::vector<std::string> split(std::string_view s, char sep);
std::string trim(std::string_view s);

}  // namespace aeq::io
