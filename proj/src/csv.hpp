#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace kosim::csv {

// Splits CSV text into rows of fields. Handles double-quoted fields with ""
// escapes; both \n and \r\n line endings. A trailing newline does not produce
// an empty row.
std::vector<std::vector<std::string>> parse(std::string_view text);

// Quotes a field only when it contains a comma, quote or newline.
std::string escape(std::string_view field);

std::string join_row(const std::vector<std::string>& fields);

// Shortest representation that round-trips through parse_double.
std::string format_double(double value);

// Strict parsers: the whole field must be consumed. Return false on failure.
bool parse_int(std::string_view field, int& out);
bool parse_double(std::string_view field, double& out);

} // namespace kosim::csv
