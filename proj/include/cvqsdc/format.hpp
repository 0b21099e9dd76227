// Number <-> text helpers shared by the file formats.
#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace cvqsdc {

/// Shortest text that parses back to exactly the same double.
std::string format_exact(double value);

/// Six significant digits, printf "%.6g" style.
std::string format_sig6(double value);

/// Parses the whole of `text` as a double (accepts "inf", "-inf", "nan").
/// Throws std::invalid_argument on trailing garbage or empty input.
double parse_double(std::string_view text);

long long parse_integer(std::string_view text);
std::uint64_t parse_unsigned(std::string_view text);

std::string_view trim(std::string_view text);

}  // namespace cvqsdc
