#include "ekdiff/csv.hpp"

#include <charconv>
#include <cstdlib>
#include <istream>
#include <ostream>

#include "ekdiff/errors.hpp"

namespace ekdiff {

std::string format_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_csv(std::ostream& os, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows,
               const std::vector<std::string>& leading_comments,
               const std::vector<std::string>& footer_comments) {
    for (const auto& c : leading_comments) os << "# " << c << '\n';
    for (std::size_t j = 0; j < header.size(); ++j)
        os << (j ? "," : "") << header[j];
    os << '\n';
    for (const auto& row : rows) {
        for (std::size_t j = 0; j < row.size(); ++j)
            os << (j ? "," : "") << format_double(row[j]);
        os << '\n';
    }
    for (const auto& c : footer_comments) os << "# " << c << '\n';
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

}  // namespace

CsvTable read_csv(std::istream& is) {
    CsvTable tab;
    std::string line;
    bool have_header = false;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.front() == '#') {
            std::size_t s = 1;
            while (s < line.size() && line[s] == ' ') ++s;
            tab.comments.push_back(line.substr(s));
            continue;
        }
        if (!have_header) {
            tab.header = split_fields(line);
            have_header = true;
            continue;
        }
        const auto fields = split_fields(line);
        if (fields.size() != tab.header.size())
            throw TableError("read_csv: row width does not match the header");
        std::vector<double> row(fields.size());
        for (std::size_t j = 0; j < fields.size(); ++j) {
            const std::string& f = fields[j];
            const auto res = std::from_chars(f.data(), f.data() + f.size(), row[j]);
            if (res.ec != std::errc() || res.ptr != f.data() + f.size())
                throw TableError("read_csv: cannot parse numeric field '" + f + "'");
        }
        tab.rows.push_back(std::move(row));
    }
    if (!have_header) throw TableError("read_csv: missing header row");
    return tab;
}

}  // namespace ekdiff
