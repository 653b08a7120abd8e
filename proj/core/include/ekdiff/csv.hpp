#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ekdiff {

// Shortest decimal form that parses back to the identical double; wraps
// std::to_chars.
std::string format_double(double v);

// Writer contract shared by every emitted table: '.' decimal separator, '\n'
// line endings, a header row always, comment lines starting with '#'.
void write_csv(std::ostream& os, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows,
               const std::vector<std::string>& leading_comments = {},
               const std::vector<std::string>& footer_comments = {});

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    std::vector<std::string> comments;  // '#' lines, in file order, marker stripped
};

// Reads tables produced by write_csv; throws TableError on malformed input.
CsvTable read_csv(std::istream& is);

}  // namespace ekdiff
