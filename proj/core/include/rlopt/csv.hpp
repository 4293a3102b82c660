#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace rlopt::csv {

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double value);

/// Parses a whole field as a double; throws UsageError on junk.
double parse_double(std::string_view field);

/// Splits one line on commas (no quoting; none of our fields need it).
std::vector<std::string> split(std::string_view line);

/// Writes fields joined by commas and terminated with '\n'.
void write_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace rlopt::csv
