#pragma once

#include <cctype>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace tvar {

/// Input or format problem tied to a specific line of a CSV file.
class CsvError : public std::runtime_error {
public:
    CsvError(int line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

/// Full-precision float formatting: 17 significant digits round-trip exactly.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    fields.push_back(cur);
    return fields;
}

inline std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

inline bool parse_double(const std::string& s, double& out) {
    const std::string t = trim(s);
    if (t.empty()) return false;
    char* end = nullptr;
    out = std::strtod(t.c_str(), &end);
    return end == t.c_str() + t.size();
}

inline bool is_missing_token(const std::string& s) {
    const std::string t = trim(s);
    return t.empty() || t == "NA" || t == "na" || t == "NaN" || t == "nan";
}

/// Reads one numeric column from a CSV file. A single-column file may have an
/// optional header row; a multi-column file must have a header, and the column
/// named `column` (default "x") is extracted. Missing entries ("NA" or empty)
/// become nullopt. Malformed numbers raise CsvError with the line number.
inline std::vector<std::optional<double>> read_csv_column(const std::string& path,
                                                          const std::string& column = "x") {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open input file: " + path);
    std::vector<std::optional<double>> out;
    std::string line;
    int lineno = 0;
    int col_index = -1;
    bool first = true;
    while (std::getline(in, line)) {
        ++lineno;
        const auto fields = split_csv_line(line);
        if (first) {
            first = false;
            if (fields.size() > 1) {
                for (std::size_t i = 0; i < fields.size(); ++i)
                    if (trim(fields[i]) == column) col_index = static_cast<int>(i);
                if (col_index < 0)
                    throw CsvError(lineno, "multi-column file needs a header with column '" + column + "'");
                continue;
            }
            col_index = 0;
            double v;
            if (is_missing_token(fields[0])) {
                out.emplace_back(std::nullopt);
                continue;
            }
            if (!parse_double(fields[0], v)) continue;  // header row
            out.emplace_back(v);
            continue;
        }
        if (fields.size() == 1 && trim(fields[0]).empty()) continue;  // blank line
        if (static_cast<int>(fields.size()) <= col_index)
            throw CsvError(lineno, "row has too few columns");
        const std::string& cell = fields[static_cast<std::size_t>(col_index)];
        if (is_missing_token(cell)) {
            out.emplace_back(std::nullopt);
            continue;
        }
        double v;
        if (!parse_double(cell, v)) throw CsvError(lineno, "not a number: '" + trim(cell) + "'");
        out.emplace_back(v);
    }
    return out;
}

/// Writes columns of equal length as CSV with a header row, full precision.
inline void write_csv(const std::string& path, const std::vector<std::string>& headers,
                      const std::vector<std::vector<double>>& columns) {
    std::ofstream outf(path);
    if (!outf) throw std::runtime_error("cannot open output file: " + path);
    std::ostringstream os;
    for (std::size_t i = 0; i < headers.size(); ++i) {
        if (i) os << ',';
        os << headers[i];
    }
    os << '\n';
    const std::size_t rows = columns.empty() ? 0 : columns.front().size();
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c) {
            if (c) os << ',';
            os << format_double(columns[c][r]);
        }
        os << '\n';
    }
    outf << os.str();
}

}  // namespace tvar
