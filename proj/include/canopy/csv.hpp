#ifndef CANOPY_CSV_HPP
#define CANOPY_CSV_HPP

#include <string>
#include <string_view>
#include <vector>

namespace canopy::csv {

/// Split one CSV line into cells. Double quotes guard embedded commas and
/// doubled quotes escape a literal quote. Cells are trimmed outside quotes.
std::vector<std::string> split_line(std::string_view line);

/// Split text into rows of cells. Blank lines are skipped; a trailing
/// carriage return is tolerated.
std::vector<std::vector<std::string>> parse(std::string_view content);

/// Quote a cell when it contains a comma, quote, or newline.
std::string escape(std::string_view cell);

/// Shortest decimal form that round-trips the value; integral doubles print
/// without a decimal point (90000 -> "90000").
std::string format_number(double value);

} // namespace canopy::csv

#endif
