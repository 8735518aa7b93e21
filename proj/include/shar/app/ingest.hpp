#pragma once

// Reading the two groups from delimited text. Row order is time order.
// A file may start with a header row; columns are picked by header name or
// by 1-based position.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "shar/error.hpp"
#include "shar/sample.hpp"

namespace shar::app {

struct Table {
    std::string path;
    std::vector<std::string> header;  ///< empty when the file has none
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers;  ///< 1-based source line of each row
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\"");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\"");
    return s.substr(first, last - first + 1);
}

inline char detect_delimiter(std::string_view line) {
    for (char c : {',', '\t', ';'}) {
        if (line.find(c) != std::string_view::npos) return c;
    }
    return ' ';
}

inline std::vector<std::string> split(std::string_view line, char delim) {
    std::vector<std::string> cells;
    if (delim == ' ') {
        std::size_t i = 0;
        while (i < line.size()) {
            while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
            if (i >= line.size()) break;
            std::size_t j = i;
            while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
            cells.emplace_back(trim(line.substr(i, j - i)));
            i = j;
        }
        return cells;
    }
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(delim, start);
        cells.emplace_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return cells;
}

inline std::optional<double> parse_number(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

}  // namespace detail

/// Reads a delimited file (comma, tab, semicolon or whitespace, detected
/// from the first non-blank line). The first row is a header when none of
/// its cells is a number. Blank lines and lines starting with '#' are
/// skipped.
inline Table read_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error(path + ": cannot open file");
    Table t;
    t.path = path;
    std::string line;
    std::size_t lineno = 0;
    char delim = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++lineno;
        const auto body = detail::trim(line);
        if (body.empty() || body.front() == '#') continue;
        if (!delim) delim = detail::detect_delimiter(line);
        auto cells = detail::split(line, delim);
        if (first) {
            first = false;
            const bool any_number = std::any_of(
                cells.begin(), cells.end(), [](const std::string& c) { return detail::parse_number(c).has_value(); });
            if (!any_number) {
                t.header = std::move(cells);
                continue;
            }
        }
        t.rows.push_back(std::move(cells));
        t.line_numbers.push_back(lineno);
    }
    if (t.rows.empty()) {
        throw input_error(path + (t.header.empty() ? ": file has no data rows" : ": file has a header but no data rows"));
    }
    return t;
}

/// Resolves a column selector: a header name, else a 1-based index. An
/// empty selector means the first column when the table has exactly one,
/// and is an error otherwise.
inline std::size_t column_index(const Table& t, const std::string& selector) {
    const std::size_t width = t.header.empty() ? t.rows.front().size() : t.header.size();
    if (selector.empty()) {
        if (width == 1) return 0;
        throw input_error(t.path + ": file has " + std::to_string(width) + " columns; choose one with a column selector");
    }
    if (auto it = std::find(t.header.begin(), t.header.end(), selector); it != t.header.end()) {
        return static_cast<std::size_t>(it - t.header.begin());
    }
    std::size_t idx = 0;
    const auto [ptr, ec] = std::from_chars(selector.data(), selector.data() + selector.size(), idx);
    if (ec == std::errc() && ptr == selector.data() + selector.size() && idx >= 1 && idx <= width) return idx - 1;
    throw input_error(t.path + ": no column '" + selector + "'");
}

inline std::string cell(const Table& t, std::size_t row, std::size_t col) {
    if (col >= t.rows[row].size()) {
        throw input_error(t.path + ": line " + std::to_string(t.line_numbers[row]) + ": missing column " +
                          std::to_string(col + 1));
    }
    return t.rows[row][col];
}

inline double numeric_cell(const Table& t, std::size_t row, std::size_t col) {
    const std::string raw = cell(t, row, col);
    const auto v = detail::parse_number(raw);
    if (!v) {
        throw input_error(t.path + ": line " + std::to_string(t.line_numbers[row]) + ": column " +
                          std::to_string(col + 1) + ": " + (raw.empty() ? "missing value" : "not a number '" + raw + "'"));
    }
    return *v;
}

inline std::vector<double> read_column(const Table& t, const std::string& selector) {
    const std::size_t col = column_index(t, selector);
    std::vector<double> out;
    out.reserve(t.rows.size());
    for (std::size_t r = 0; r < t.rows.size(); ++r) out.push_back(numeric_cell(t, r, col));
    return out;
}

inline TimeSeriesSample make_group(std::vector<double> values, const std::string& what) {
    if (values.size() < TimeSeriesSample::min_length) {
        throw input_error(what + ": group has " + std::to_string(values.size()) + " observations, need at least " +
                          std::to_string(TimeSeriesSample::min_length));
    }
    return TimeSeriesSample(std::move(values));
}

struct IngestConfig {
    // two-file mode
    std::string file1;
    std::string file2;
    std::string column;
    // single-file mode
    std::string file;
    std::string group_column;
    std::string value_column;

    bool two_file() const { return !file1.empty() || !file2.empty(); }
    bool single_file() const { return !file.empty(); }
};

struct Groups {
    TimeSeriesSample y1;
    TimeSeriesSample y2;
    std::string label1;
    std::string label2;
};

/// Orders two group labels: numerically when both are numbers, otherwise
/// by first appearance.
inline std::pair<std::string, std::string> order_labels(const std::vector<std::string>& seen) {
    const auto a = detail::parse_number(seen[0]);
    const auto b = detail::parse_number(seen[1]);
    if (a && b && *b < *a) return {seen[1], seen[0]};
    return {seen[0], seen[1]};
}

inline Groups ingest(const IngestConfig& cfg) {
    if (cfg.two_file() == cfg.single_file()) {
        throw input_error("give either two files (file1, file2) or one file with a group column");
    }
    if (cfg.two_file()) {
        if (cfg.file1.empty() || cfg.file2.empty()) throw input_error("two-file mode needs both file1 and file2");
        const Table t1 = read_table(cfg.file1);
        const Table t2 = read_table(cfg.file2);
        return {make_group(read_column(t1, cfg.column), cfg.file1), make_group(read_column(t2, cfg.column), cfg.file2),
                cfg.file1, cfg.file2};
    }
    if (cfg.group_column.empty() || cfg.value_column.empty()) {
        throw input_error("single-file mode needs a group column and a value column");
    }
    const Table t = read_table(cfg.file);
    const std::size_t gcol = column_index(t, cfg.group_column);
    const std::size_t vcol = column_index(t, cfg.value_column);
    std::vector<std::string> labels;
    std::vector<std::pair<std::string, double>> obs;
    obs.reserve(t.rows.size());
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        std::string g = cell(t, r, gcol);
        if (g.empty()) {
            throw input_error(t.path + ": line " + std::to_string(t.line_numbers[r]) + ": missing group label");
        }
        if (std::find(labels.begin(), labels.end(), g) == labels.end()) {
            labels.push_back(g);
            if (labels.size() > 2) {
                throw input_error(t.path + ": line " + std::to_string(t.line_numbers[r]) + ": third group label '" + g +
                                  "' (exactly two groups expected)");
            }
        }
        obs.emplace_back(std::move(g), numeric_cell(t, r, vcol));
    }
    if (labels.size() < 2) throw input_error(t.path + ": only one group label found");
    const auto [l1, l2] = order_labels(labels);
    std::vector<double> v1;
    std::vector<double> v2;
    for (const auto& [g, v] : obs) (g == l1 ? v1 : v2).push_back(v);
    return {make_group(std::move(v1), t.path + " group " + l1), make_group(std::move(v2), t.path + " group " + l2),
            l1, l2};
}

}  // namespace shar::app
