#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace finmatcher::csv {

using Row = std::vector<std::string>;

/// Parses comma-separated text with double-quote escaping ("" inside quotes).
/// Quoted fields may span lines. Throws ParseError naming `source` and the line.
std::vector<Row> parse(std::string_view text, const std::string& source = "<csv>");

/// Quotes a field only when it contains a comma, quote, or line break.
std::string escape(std::string_view field);

void write_row(std::ostream& out, const Row& row);

/// Formats a double so that parsing it back yields the identical value.
std::string format_double(double value);

}  // namespace finmatcher::csv
