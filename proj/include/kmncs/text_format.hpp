#pragma once

#include <string>
#include <string_view>

namespace kmncs {

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);

/// Strict parse of a full string as a double; throws InvalidArgument.
double parse_double(std::string_view s);

}  // namespace kmncs
