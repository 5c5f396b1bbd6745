#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace simregress {

/// Parses a real number as written by Fortran or C codes. Accepts plain
/// decimals, `E`/`e` exponents, Fortran `D`/`d` exponents (`1.0D-3`), and
/// `nan`/`inf` spellings. The whole token must be consumed.
std::optional<double> parse_real(std::string_view token);

std::optional<long long> parse_integer(std::string_view token);

/// 17 significant digits in E-notation (`1.0000000000000000E-03`); round-trips
/// every finite double. Non-finite values print as `NaN`, `Inf`, `-Inf`.
std::string format_real(double value);

/// Shortest decimal string that round-trips (for reports and scenario files).
std::string format_short(double value);

std::string_view trim(std::string_view text);

std::vector<std::string_view> split_whitespace(std::string_view text);

bool starts_with(std::string_view text, std::string_view prefix);

std::string read_text_file(const std::string& path);

}  // namespace simregress
