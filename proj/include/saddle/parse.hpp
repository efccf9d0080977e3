#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "saddle/common.hpp"

namespace saddle {

// Text helpers shared by fixture names, config files and the CLI. All of
// them throw ConfigError with the offending text in the message.

std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

double parse_double(std::string_view s);
long long parse_int(std::string_view s);
std::uint64_t parse_u64(std::string_view s);
bool parse_bool(std::string_view s);

/// "1,2.5,-3" -> vector
Vector parse_vector(std::string_view s);
/// "1,2;2,1" -> 2x2 matrix; rows must have equal length.
Matrix parse_matrix(std::string_view s);
/// "0.2,0;-0.2,0" -> list of points
std::vector<Vector> parse_point_list(std::string_view s);
/// "0,1;2,3" -> index blocks
std::vector<std::vector<int>> parse_blocks(std::string_view s);

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double v);
/// Comma-joined format_double.
std::string format_vector(const Vector& v);

}  // namespace saddle
