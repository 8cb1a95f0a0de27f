#pragma once

#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pleiades::csv {

// Comma-separated fields with surrounding whitespace trimmed. Double quotes
// around a field are stripped; embedded separators inside quotes are kept.
std::vector<std::string> split(std::string_view line);

// Reads the next non-blank line that is not a '#' comment. Strips a trailing CR.
bool next_record(std::istream& in, std::string& line);

std::optional<double> to_double(std::string_view s);
std::optional<long long> to_integer(std::string_view s);

// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

// Fixed decimals, correctly rounded from the binary value.
std::string format_fixed(double v, int decimals);

std::string lower(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace pleiades::csv
