#pragma once

#include <span>
#include <string>
#include <string_view>

namespace reachkit {

/// Shortest decimal that parses back to the same double.
std::string format_double(double x);

/// "[a, b, c]" using format_double.
std::string format_vector(std::span<const double> v);

/// Full-string parse; throws UsageError on trailing garbage or an empty string.
double parse_double(std::string_view text);

}  // namespace reachkit
