#pragma once

// CSV ingestion: one observation per row, one variable per column, optional
// header row. The resulting Sample is the transpose (variables as rows).

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "hdtest/matcore.hpp"

namespace hdtest::csv {

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(',', start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? line.npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline bool parse_double(std::string_view field, double& out) {
    if (field.empty()) return false;
    if (field.front() == '+') field.remove_prefix(1);
    const auto* end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), end, out);
    return ec == std::errc() && ptr == end;
}

}  // namespace detail

inline Sample parse(std::istream& in, const std::string& origin = "<stream>") {
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        const auto fields = detail::split(line);
        std::vector<double> values(fields.size());
        bool numeric = true;
        for (std::size_t c = 0; c < fields.size(); ++c) {
            if (!detail::parse_double(fields[c], values[c])) {
                numeric = false;
                break;
            }
        }
        if (!numeric) {
            if (rows.empty() && width == 0) {
                width = fields.size();  // header row
                continue;
            }
            fail(ErrorCode::ParseError, origin + ":" + std::to_string(line_no) + ": non-numeric field");
        }
        if (width == 0) width = values.size();
        if (values.size() != width) {
            fail(ErrorCode::ParseError, origin + ":" + std::to_string(line_no) + ": expected " +
                                            std::to_string(width) + " columns, got " +
                                            std::to_string(values.size()));
        }
        rows.push_back(std::move(values));
    }
    if (rows.empty()) fail(ErrorCode::TooFewObservations, origin + ": no observations");
    Matrix data(static_cast<Index>(width), static_cast<Index>(rows.size()));
    for (std::size_t l = 0; l < rows.size(); ++l) {
        for (std::size_t v = 0; v < width; ++v) data(static_cast<Index>(v), static_cast<Index>(l)) = rows[l][v];
    }
    return Sample(std::move(data));
}

inline Sample read(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::ParseError, "cannot open " + path);
    return parse(in, path);
}

inline void write(std::ostream& out, const Sample& sample, int digits = 17) {
    out.precision(digits);
    for (Index l = 0; l < sample.n(); ++l) {
        for (Index v = 0; v < sample.p(); ++v) {
            if (v) out << ',';
            out << sample.data()(v, l);
        }
        out << '\n';
    }
}

}  // namespace hdtest::csv
