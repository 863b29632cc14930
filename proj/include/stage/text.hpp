#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace stage {

std::string_view trim(std::string_view text);

/// Lower-case, trimmed, with spaces and hyphens folded to '_'.
std::string normalize_token(std::string_view text);

std::vector<std::string> split(std::string_view text, char sep);

/// Shortest decimal string that parses back to exactly `value`.
std::string format_shortest(double value);

/// Fixed-point display with round-half-even applied to the shortest
/// round-trip decimal form of `value`, so 0.87575 -> "0.8757" at 4 places.
/// Locale independent; never emits "-0.00".
std::string format_fixed(double value, int decimals);

std::optional<long long> parse_integer(std::string_view text);
std::optional<double> parse_real(std::string_view text);

}  // namespace stage
