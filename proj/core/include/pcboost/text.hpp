#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pcboost {

/// `value` with 17 significant digits; parses back to the same double.
std::string format_number(double value);
/// Fixed-point text for human-facing tables.
std::string format_fixed(double value, int decimals);

/// Strict full-string parse; nullopt on trailing garbage, empty input or overflow.
std::optional<double> parse_number(std::string_view text);

std::string_view trim(std::string_view text);
/// Splits on `sep` and trims each field. An empty input yields one empty field.
std::vector<std::string> split_fields(std::string_view text, char sep);

} // namespace pcboost
