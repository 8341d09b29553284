#pragma once

#include "quartets/error.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace quartets {

struct Provenance {
    std::string mechanism;
    std::uint64_t seed = 0;
    std::size_t n = 0;
};

// Named numeric columns of equal length.
class Dataset {
public:
    void add_column(std::string name, std::vector<double> values) {
        if (name.empty()) fail(ErrorKind::Schema, "column name must not be empty");
        if (has_column(name)) fail(ErrorKind::Schema, "duplicate column '" + name + "'");
        if (!names_.empty() && values.size() != rows())
            fail(ErrorKind::Schema, "column '" + name + "' has " + std::to_string(values.size()) + " rows, expected " +
                                        std::to_string(rows()));
        names_.push_back(std::move(name));
        columns_.push_back(std::move(values));
    }

    std::size_t rows() const { return columns_.empty() ? 0 : columns_.front().size(); }
    std::size_t cols() const { return columns_.size(); }
    const std::vector<std::string>& names() const { return names_; }

    bool has_column(std::string_view name) const {
        return std::find(names_.begin(), names_.end(), name) != names_.end();
    }

    std::span<const double> column(std::string_view name) const {
        auto it = std::find(names_.begin(), names_.end(), name);
        if (it == names_.end()) fail(ErrorKind::UnknownColumn, "unknown column '" + std::string(name) + "'");
        return columns_[static_cast<std::size_t>(it - names_.begin())];
    }

    std::span<const double> column(std::size_t i) const { return columns_.at(i); }

    // Copy of the listed columns, in the listed order.
    Dataset select(const std::vector<std::string>& wanted) const {
        Dataset out;
        for (const auto& w : wanted) {
            auto c = column(w);
            out.add_column(w, std::vector<double>(c.begin(), c.end()));
        }
        out.provenance = provenance;
        return out;
    }

    Dataset renamed(const std::vector<std::pair<std::string, std::string>>& mapping) const {
        Dataset out;
        for (const auto& [from, to] : mapping) {
            auto c = column(from);
            out.add_column(to, std::vector<double>(c.begin(), c.end()));
        }
        out.provenance = provenance;
        return out;
    }

    friend bool operator==(const Dataset& a, const Dataset& b) {
        return a.names_ == b.names_ && a.columns_ == b.columns_;
    }

    std::optional<Provenance> provenance;

private:
    std::vector<std::string> names_;
    std::vector<std::vector<double>> columns_;
};

// ---------------------------------------------------------------------------
// Number formatting: 17 significant digits, locale independent, so a value
// written and read back is bit-identical.

inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

inline std::optional<double> try_parse_double(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

// ---------------------------------------------------------------------------
// CSV

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::optional<std::size_t> find(std::string_view name) const {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) return std::nullopt;
        return static_cast<std::size_t>(it - header.begin());
    }
};

namespace detail {

inline std::vector<std::string> split_csv_line(std::string_view line, std::size_t line_no) {
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(field));
            field.clear();
        } else {
            field += c;
        }
    }
    if (quoted) fail(ErrorKind::Schema, "line " + std::to_string(line_no) + ": unterminated quote");
    out.push_back(std::move(field));
    return out;
}

inline std::string quote_if_needed(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

} // namespace detail

inline CsvTable read_csv_table(std::istream& in) {
    CsvTable t;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = detail::split_csv_line(line, line_no);
        if (!have_header) {
            t.header = std::move(fields);
            have_header = true;
            continue;
        }
        if (fields.size() != t.header.size()) {
            fail(ErrorKind::Schema, "line " + std::to_string(line_no) + ": expected " +
                                        std::to_string(t.header.size()) + " fields, found " +
                                        std::to_string(fields.size()));
        }
        t.rows.push_back(std::move(fields));
    }
    if (!have_header) fail(ErrorKind::Schema, "CSV input is empty");
    return t;
}

inline CsvTable load_csv_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Io, "cannot open '" + path.string() + "' for reading");
    return read_csv_table(in);
}

// Numeric dataset from the listed columns of a table (all columns when empty).
inline Dataset dataset_from_table(const CsvTable& t, const std::vector<std::string>& columns = {},
                                  std::span<const std::size_t> row_subset = {}) {
    const auto& wanted = columns.empty() ? t.header : columns;
    Dataset d;
    for (const auto& name : wanted) {
        auto idx = t.find(name);
        if (!idx) fail(ErrorKind::Schema, "CSV is missing column '" + name + "'");
        std::vector<double> values;
        auto parse_row = [&](std::size_t r) {
            auto v = try_parse_double(t.rows[r][*idx]);
            if (!v) {
                fail(ErrorKind::Schema, "row " + std::to_string(r + 1) + ", column '" + name + "': '" + t.rows[r][*idx] +
                                            "' is not a number");
            }
            values.push_back(*v);
        };
        if (row_subset.empty()) {
            for (std::size_t r = 0; r < t.rows.size(); ++r) parse_row(r);
        } else {
            for (auto r : row_subset) parse_row(r);
        }
        d.add_column(name, std::move(values));
    }
    return d;
}

inline void write_csv(const Dataset& d, std::ostream& out) {
    for (std::size_t c = 0; c < d.cols(); ++c) out << (c ? "," : "") << detail::quote_if_needed(d.names()[c]);
    out << '\n';
    for (std::size_t r = 0; r < d.rows(); ++r) {
        for (std::size_t c = 0; c < d.cols(); ++c) out << (c ? "," : "") << format_double(d.column(c)[r]);
        out << '\n';
    }
}

inline Dataset read_csv(std::istream& in) { return dataset_from_table(read_csv_table(in)); }

inline void save_csv(const Dataset& d, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
    write_csv(d, out);
    if (!out) fail(ErrorKind::Io, "write to '" + path.string() + "' failed");
}

inline Dataset load_csv(const std::filesystem::path& path) { return dataset_from_table(load_csv_table(path)); }

} // namespace quartets
